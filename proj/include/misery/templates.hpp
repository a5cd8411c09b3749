#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace misery {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TemplateVars = std::vector<std::pair<std::string_view, std::string>>;

/// Named prompt texts with `{placeholder}` slots. The built-in set is compiled
/// from assets/prompts; a directory of .txt files can override any entry.
class PromptTemplates {
 public:
  static const PromptTemplates& builtin();
  static PromptTemplates from_directory(const std::string& dir);

  const std::string& text(std::string_view name) const;

  /// Single pass: substituted values are never re-expanded, so statements
  /// containing braces come through verbatim. Unknown placeholders throw.
  std::string render(std::string_view name, const TemplateVars& vars) const;

  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::string, std::less<>> texts_;
};

std::string render_template(std::string_view text, const TemplateVars& vars);

}  // namespace misery

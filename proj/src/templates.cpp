#include "misery/templates.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "misery/prompt_assets.hpp"

namespace misery {

const PromptTemplates& PromptTemplates::builtin() {
  static const PromptTemplates instance = [] {
    PromptTemplates t;
    for (const auto& [name, text] : assets::kPrompts) t.texts_.emplace(std::string(name), std::string(text));
    return t;
  }();
  return instance;
}

PromptTemplates PromptTemplates::from_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  PromptTemplates t = builtin();
  if (!fs::is_directory(dir)) throw TemplateError("prompt directory '" + dir + "' does not exist");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    while (!text.empty() && text.back() == '\n') text.pop_back();
    t.texts_[entry.path().stem().string()] = std::move(text);
  }
  return t;
}

const std::string& PromptTemplates::text(std::string_view name) const {
  auto it = texts_.find(name);
  if (it == texts_.end()) throw TemplateError("no prompt template named '" + std::string(name) + "'");
  return it->second;
}

std::string PromptTemplates::render(std::string_view name, const TemplateVars& vars) const {
  return render_template(text(name), vars);
}

std::vector<std::string> PromptTemplates::names() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : texts_) out.push_back(k);
  return out;
}

std::string render_template(std::string_view text, const TemplateVars& vars) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto open = text.find('{', i);
    if (open == std::string_view::npos) {
      out.append(text.substr(i));
      break;
    }
    out.append(text.substr(i, open - i));
    const auto close = text.find('}', open);
    if (close == std::string_view::npos) throw TemplateError("unterminated placeholder in template");
    const auto key = text.substr(open + 1, close - open - 1);
    bool found = false;
    for (const auto& [k, v] : vars) {
      if (k == key) {
        out.append(v);
        found = true;
        break;
      }
    }
    if (!found) throw TemplateError("template placeholder {" + std::string(key) + "} has no value");
    i = close + 1;
  }
  return out;
}

}  // namespace misery

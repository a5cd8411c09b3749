#pragma once

#include <string>
#include <utility>
#include <vector>

namespace misery::detail {

struct HttpResult {
  int status = 0;
  std::string body;
};

/// POSTs a JSON body. Connection-level failures raise TransientError; the
/// caller interprets the status.
HttpResult post_json(const std::string& endpoint, const std::vector<std::pair<std::string, std::string>>& headers,
                     const std::string& body, double timeout_s);

/// Maps a non-2xx status to TransientError (429, 5xx) or ProtocolError.
[[noreturn]] void raise_for_status(const HttpResult& result, const std::string& who);

std::string excerpt(const std::string& body, std::size_t limit = 300);

/// Reads the credential from the named environment variable.
std::string read_credential(const std::string& env_name, const std::string& who);

}  // namespace misery::detail

#pragma once

#include <nlohmann/json.hpp>

namespace misery {

// Insertion-ordered so that serialized reports are stable byte-for-byte.
using Json = nlohmann::ordered_json;

}  // namespace misery

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "misery/chat.hpp"
#include "misery/json.hpp"

namespace misery {

enum class OrdinalLabel { above, below, between };
enum class BinaryLabel { higher, lower };

std::string_view to_string(OrdinalLabel label);
std::string_view to_string(BinaryLabel label);

struct OrdinalAnswer {
  OrdinalLabel label;
  bool operator==(const OrdinalAnswer&) const = default;
};
struct BinaryAnswer {
  BinaryLabel label;
  bool operator==(const BinaryAnswer&) const = default;
};
struct ScalarAnswer {
  double value;
  bool operator==(const ScalarAnswer&) const = default;
};
/// Closed integer interval, 0 <= lo <= hi <= 100.
struct IntervalAnswer {
  int lo;
  int hi;
  bool operator==(const IntervalAnswer&) const = default;
};
struct InvalidAnswer {
  std::string raw;
  bool operator==(const InvalidAnswer&) const = default;
};

using ParsedAnswer = std::variant<OrdinalAnswer, BinaryAnswer, ScalarAnswer, IntervalAnswer, InvalidAnswer>;

inline bool is_invalid(const ParsedAnswer& a) { return std::holds_alternative<InvalidAnswer>(a); }

/// First number in the reply that lies in [lo, hi].
///
/// Numbers are maximal runs `digits[.digits]`. A run glued to a preceding
/// letter (`Q5`) is skipped; a run preceded by a minus sign that is not itself
/// preceded by a digit is negative. Scanning is left to right, so
/// "65/100" yields 65 and "out of 100" after an answer is never picked.
std::optional<double> parse_scalar(std::string_view reply, double lo, double hi);

/// Label parsing for ordinal/binary replies: the first word if it is a label,
/// otherwise the single distinct label word present; anything else is invalid.
ParsedAnswer parse_ordinal(std::string_view reply);
ParsedAnswer parse_binary(std::string_view reply);
ParsedAnswer parse_scalar_answer(std::string_view reply, double lo, double hi);

/// `[lo, hi]`, `lo-hi`, `lo to hi` and similar; both ends integral, within
/// [0, 100] and ordered.
ParsedAnswer parse_interval(std::string_view reply);

/// Dispatches on the question kind (free_text questions are never parsed).
ParsedAnswer parse_answer(const QuestionContext& context, std::string_view reply);

Json to_json(const ParsedAnswer& answer);
std::string describe(const ParsedAnswer& answer);

}  // namespace misery

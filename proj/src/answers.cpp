#include "misery/answers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>
#include <vector>

#include "misery/gateway.hpp"

namespace misery {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (is_alpha(c)) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

template <typename Label, std::size_t N>
std::optional<Label> pick_label(std::string_view reply, const std::array<std::pair<std::string_view, Label>, N>& table) {
  const auto ws = words(reply);
  auto lookup = [&](const std::string& w) -> std::optional<Label> {
    for (const auto& [name, label] : table) {
      if (w == name) return label;
    }
    return std::nullopt;
  };
  if (ws.empty()) return std::nullopt;
  if (auto first = lookup(ws.front())) return first;
  std::optional<Label> found;
  for (const auto& w : ws) {
    if (auto l = lookup(w)) {
      if (found && *found != *l) return std::nullopt;
      found = l;
    }
  }
  return found;
}

}  // namespace

std::string_view to_string(OrdinalLabel label) {
  switch (label) {
    case OrdinalLabel::above: return "above";
    case OrdinalLabel::below: return "below";
    case OrdinalLabel::between: return "between";
  }
  return "between";
}

std::string_view to_string(BinaryLabel label) { return label == BinaryLabel::higher ? "higher" : "lower"; }

std::optional<double> parse_scalar(std::string_view reply, double lo, double hi) {
  std::size_t i = 0;
  while (i < reply.size()) {
    if (!is_digit(reply[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < reply.size() && is_digit(reply[i])) ++i;
    if (i + 1 < reply.size() && reply[i] == '.' && is_digit(reply[i + 1])) {
      ++i;
      while (i < reply.size() && is_digit(reply[i])) ++i;
    }
    if (start > 0 && is_alpha(reply[start - 1])) continue;
    double value = 0.0;
    std::from_chars(reply.data() + start, reply.data() + i, value);
    const bool negative = start > 0 && reply[start - 1] == '-' && (start < 2 || !is_digit(reply[start - 2]));
    if (negative) value = -value;
    if (value >= lo && value <= hi) return value;
  }
  return std::nullopt;
}

ParsedAnswer parse_ordinal(std::string_view reply) {
  static constexpr std::array<std::pair<std::string_view, OrdinalLabel>, 3> table{{
      {"above", OrdinalLabel::above}, {"below", OrdinalLabel::below}, {"between", OrdinalLabel::between}}};
  if (auto l = pick_label(reply, table)) return OrdinalAnswer{*l};
  return InvalidAnswer{std::string(reply)};
}

ParsedAnswer parse_binary(std::string_view reply) {
  static constexpr std::array<std::pair<std::string_view, BinaryLabel>, 2> table{{
      {"higher", BinaryLabel::higher}, {"lower", BinaryLabel::lower}}};
  if (auto l = pick_label(reply, table)) return BinaryAnswer{*l};
  return InvalidAnswer{std::string(reply)};
}

ParsedAnswer parse_scalar_answer(std::string_view reply, double lo, double hi) {
  if (auto v = parse_scalar(reply, lo, hi)) return ScalarAnswer{*v};
  return InvalidAnswer{std::string(reply)};
}

ParsedAnswer parse_interval(std::string_view reply) {
  static const std::regex pattern(R"((\d+(?:\.\d+)?)\s*(?:,|-|–|—|to|and)\s*(\d+(?:\.\d+)?))", std::regex::icase);
  const std::string text(reply);
  std::smatch m;
  if (!std::regex_search(text, m, pattern)) return InvalidAnswer{text};
  auto integral = [](const std::string& s) -> std::optional<int> {
    double v = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    if (v != std::floor(v) || v > 100.0) return std::nullopt;
    return static_cast<int>(v);
  };
  const auto lo = integral(m[1].str());
  const auto hi = integral(m[2].str());
  if (!lo || !hi || *lo > *hi) return InvalidAnswer{text};
  return IntervalAnswer{*lo, *hi};
}

ParsedAnswer parse_answer(const QuestionContext& context, std::string_view reply) {
  switch (context.kind) {
    case QuestionKind::ordinal: return parse_ordinal(reply);
    case QuestionKind::binary: return parse_binary(reply);
    case QuestionKind::scalar: return parse_scalar_answer(reply, context.lo, context.hi);
    case QuestionKind::interval: return parse_interval(reply);
    case QuestionKind::free_text: break;
  }
  return InvalidAnswer{std::string(reply)};
}

Json to_json(const ParsedAnswer& answer) {
  return std::visit(
      [](const auto& a) -> Json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, OrdinalAnswer>) return {{"type", "ordinal"}, {"label", to_string(a.label)}};
        if constexpr (std::is_same_v<T, BinaryAnswer>) return {{"type", "binary"}, {"label", to_string(a.label)}};
        if constexpr (std::is_same_v<T, ScalarAnswer>) return {{"type", "scalar"}, {"value", a.value}};
        if constexpr (std::is_same_v<T, IntervalAnswer>) return {{"type", "interval"}, {"lo", a.lo}, {"hi", a.hi}};
        if constexpr (std::is_same_v<T, InvalidAnswer>) return {{"type", "invalid"}, {"raw", a.raw}};
      },
      answer);
}

std::string describe(const ParsedAnswer& answer) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, OrdinalAnswer> || std::is_same_v<T, BinaryAnswer>) {
          return std::string(to_string(a.label));
        } else if constexpr (std::is_same_v<T, ScalarAnswer>) {
          return format_score(a.value);
        } else if constexpr (std::is_same_v<T, IntervalAnswer>) {
          return "[" + std::to_string(a.lo) + ", " + std::to_string(a.hi) + "]";
        } else {
          return "invalid";
        }
      },
      answer);
}

}  // namespace misery

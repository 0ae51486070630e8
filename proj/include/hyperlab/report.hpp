#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperlab/bounds.hpp"

namespace hyperlab {

enum class ReportFormat { kCsv, kJson };

inline ReportFormat parse_format(std::string_view s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  throw InvalidArgument("unknown format '" + std::string(s) + "' (expected csv or json)");
}

inline constexpr const char* kCsvHeader =
    "quantity,p,card_A,card_H,M,k,empirical,bound,ratio,regime,exactness";

/// Shortest form with at most 12 significant digits; always '.' as separator.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  return {buf, res.ptr};
}

/// x rounded through its 12-digit rendering, so JSON and CSV carry the same value.
inline double round_real(double x) {
  if (!std::isfinite(x)) return x;
  const std::string s = format_real(x);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string opt_field(const std::optional<u64>& v) {
  return v ? std::to_string(*v) : std::string();
}

inline nlohmann::json opt_json(const std::optional<u64>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::optional<u64> opt_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<u64>();
}

}  // namespace detail

inline std::string csv_row(const BoundReport& r) {
  std::string row = detail::csv_field(r.quantity);
  row += ',' + std::to_string(r.inputs.p);
  row += ',' + detail::opt_field(r.inputs.card_a);
  row += ',' + detail::opt_field(r.inputs.card_h);
  row += ',' + detail::opt_field(r.inputs.m);
  row += ',' + detail::opt_field(r.inputs.k);
  row += ',' + std::to_string(r.empirical);
  row += ',' + format_real(r.bound);
  row += ',' + format_real(r.ratio);
  row += ',' + detail::csv_field(r.regime);
  row += ',';
  row += to_string(r.exactness);
  return row;
}

inline nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json inputs = {{"p", r.inputs.p},
                           {"card_A", detail::opt_json(r.inputs.card_a)},
                           {"card_H", detail::opt_json(r.inputs.card_h)},
                           {"M", detail::opt_json(r.inputs.m)},
                           {"k", detail::opt_json(r.inputs.k)}};
  if (r.inputs.K) inputs["K"] = round_real(*r.inputs.K);
  nlohmann::json ratio = std::isfinite(r.ratio) ? nlohmann::json(round_real(r.ratio)) : nlohmann::json(nullptr);
  return {{"quantity", r.quantity},     {"inputs", inputs},
          {"empirical", r.empirical},   {"bound", round_real(r.bound)},
          {"ratio", ratio},             {"regime", r.regime},
          {"exactness", to_string(r.exactness)}};
}

inline BoundReport report_from_json(const nlohmann::json& j) {
  BoundReport r;
  r.quantity = j.at("quantity").get<std::string>();
  const auto& in = j.at("inputs");
  r.inputs.p = in.at("p").get<u64>();
  r.inputs.card_a = detail::opt_from_json(in, "card_A");
  r.inputs.card_h = detail::opt_from_json(in, "card_H");
  r.inputs.m = detail::opt_from_json(in, "M");
  r.inputs.k = detail::opt_from_json(in, "k");
  if (in.contains("K")) r.inputs.K = in.at("K").get<double>();
  r.empirical = j.at("empirical").get<u64>();
  r.bound = j.at("bound").get<double>();
  r.ratio = j.at("ratio").is_null() ? HUGE_VAL : j.at("ratio").get<double>();
  r.regime = j.at("regime").get<std::string>();
  const auto ex = j.at("exactness").get<std::string>();
  if (ex == "exact-constant") {
    r.exactness = Exactness::kExactConstant;
  } else if (ex == "asymptotic") {
    r.exactness = Exactness::kAsymptotic;
  } else {
    throw InvalidArgument("unknown exactness '" + ex + "'");
  }
  return r;
}

inline void emit(const std::vector<BoundReport>& reports, ReportFormat format, std::ostream& os) {
  if (format == ReportFormat::kCsv) {
    os << kCsvHeader << '\n';
    for (const auto& r : reports) os << csv_row(r) << '\n';
    return;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  os << arr.dump(2) << '\n';
}

inline std::string emit_string(const std::vector<BoundReport>& reports, ReportFormat format) {
  std::ostringstream os;
  emit(reports, format, os);
  return os.str();
}

/// Writes the reports to path, replacing any existing file.
inline void emit_to_file(const std::vector<BoundReport>& reports, ReportFormat format,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << emit_string(reports, format);
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

}  // namespace hyperlab

#include "nwise/marginals.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nwise {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& token, double& out) {
  std::string t = trim(token);
  if (!t.empty() && t.front() == '"' && t.back() == '"' && t.size() >= 2) {
    t = t.substr(1, t.size() - 2);
  }
  if (t.empty()) return false;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

// Best rational approximation of `x` with denominator <= max_den (continued
// fraction convergents plus the best semiconvergent).
Rational limit_denominator(const Rational& x, const BigInt& max_den) {
  if (x.get_den() <= max_den) return x;
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  BigInt n = x.get_num(), d = x.get_den();
  while (true) {
    BigInt a = n / d;  // x >= 0 here, truncation is floor
    BigInt q2 = q0 + a * q1;
    if (q2 > max_den) break;
    BigInt p2 = p0 + a * p1;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    BigInt rem = n - a * d;
    n = d;
    d = rem;
    if (d == 0) break;
  }
  BigInt k = (max_den - q0) / q1;
  Rational bound1(BigInt(p0 + k * p1), BigInt(q0 + k * q1));
  Rational bound2(p1, q1);
  bound1.canonicalize();
  bound2.canonicalize();
  return abs(Rational(bound2 - x)) <= abs(Rational(bound1 - x)) ? bound2 : bound1;
}

}  // namespace

bool exact_rational(double x, Rational& out) {
  if (!std::isfinite(x) || x < 0) return false;
  const Rational exact(x);
  const Rational candidate = limit_denominator(exact, BigInt(kMaxExactDenominator));
  // `candidate` must round to `x`: no neighbouring double may be closer.
  const Rational below(std::nextafter(x, -INFINITY));
  const Rational above(std::nextafter(x, INFINITY));
  const Rational dist = abs(Rational(candidate - exact));
  if (dist > abs(Rational(candidate - below)) || dist > abs(Rational(candidate - above))) {
    return false;
  }
  out = candidate;
  return true;
}

ExactProfile to_exact(const MarginalProfile& profile) {
  const std::vector<double> original = profile.original_values();
  std::vector<Rational> values(original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (!exact_rational(original[i], values[i])) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "value " << original[i] << " at index " << i + 1
          << " is not a decimal with denominator <= " << kMaxExactDenominator
          << "; rational mode unavailable";
      throw ValidationError(msg.str());
    }
  }
  // Stable sort of equal keys reproduces the same permutation.
  return ExactProfile::from_raw(values);
}

ProfileFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? ProfileFormat::json : ProfileFormat::csv;
}

std::vector<double> parse_marginals(const std::string& text, ProfileFormat format) {
  std::vector<double> values;
  if (format == ProfileFormat::csv) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      double v = 0;
      if (!parse_double(line, v)) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + trim(line) +
                         "' as a probability");
      }
      values.push_back(v);
    }
    if (values.empty()) throw ParseError("line 1: no marginal probabilities found");
    return values;
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("marginals")) {
    throw ParseError("field 'marginals': missing");
  }
  const auto& arr = doc.at("marginals");
  if (!arr.is_array()) throw ParseError("field 'marginals': not an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw ParseError("field 'marginals[" + std::to_string(i) + "]': not a number");
    }
    values.push_back(arr[i].get<double>());
  }
  if (values.empty()) throw ParseError("field 'marginals': empty array");
  return values;
}

MarginalProfile load_profile(const std::filesystem::path& path, ProfileFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "': file not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  return MarginalProfile::from_raw(parse_marginals(buf.str(), format));
}

std::vector<double> parse_marginal_list(const std::string& list) {
  std::vector<double> values;
  std::size_t start = 0;
  std::size_t field = 1;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const std::string token = list.substr(start, comma == std::string::npos ? std::string::npos
                                                                             : comma - start);
    double v = 0;
    if (!parse_double(token, v)) {
      throw ParseError("field " + std::to_string(field) + ": cannot parse '" + trim(token) +
                       "' as a probability");
    }
    values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
    ++field;
  }
  return values;
}

std::string profile_to_json(const MarginalProfile& profile) {
  nlohmann::json doc;
  doc["marginals"] = profile.original_values();
  return doc.dump();
}

}  // namespace nwise

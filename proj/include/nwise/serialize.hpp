#ifndef NWISE_SERIALIZE_HPP
#define NWISE_SERIALIZE_HPP

// JSON forms of the library's result types. Probabilities are written as
// JSON numbers (doubles); event subsets use 1-based indices in the caller's
// original order.

#include <cstdint>
#include <string>

#include "json.hpp"
#include "nwise/bounds.hpp"
#include "nwise/marginals.hpp"
#include "nwise/measure_family.hpp"
#include "nwise/oracle.hpp"

namespace nwise {

using Json = nlohmann::json;

inline Json coefficient_to_json(const BigInt& c) {
  if (c.fits_ulong_p()) return Json(static_cast<std::uint64_t>(c.get_ui()));
  return Json(c.get_str());
}

inline BigInt coefficient_from_json(const Json& j) {
  if (j.is_string()) return BigInt(j.get<std::string>());
  return BigInt(j.get<std::uint64_t>());
}

template <Scalar Real>
Json to_json(const SInterval<Real>& interval) {
  return Json{{"s_min", to_double(interval.s_min)},
              {"s_max", to_double(interval.s_max)},
              {"p", interval.p},
              {"m", interval.m},
              {"collapsed", interval.collapsed}};
}

/// {"n", "s": number|null, "atoms": [{"subset": [...], "prob": ...}]}, atoms
/// in sorted-space mask order.
template <Scalar Real>
Json to_json(const AtomicMeasure<Real>& measure, const BasicMarginalProfile<Real>& profile) {
  Json atoms = Json::array();
  for (std::size_t mask = 0; mask < measure.atoms.size(); ++mask) {
    atoms.push_back(Json{{"subset", profile.original_indices(SubsetMask(mask))},
                         {"prob", to_double(measure.atoms[mask])}});
  }
  Json doc{{"n", measure.n}, {"s", nullptr}, {"atoms", std::move(atoms)}};
  if (measure.s) doc["s"] = to_double(*measure.s);
  return doc;
}

/// Inverse of to_json for measures; atoms may appear in any order.
inline AtomicMeasure<double> measure_from_json(const Json& doc, const MarginalProfile& profile) {
  AtomicMeasure<double> measure;
  measure.n = doc.at("n").get<std::size_t>();
  if (measure.n != profile.size()) throw ParseError("measure n does not match the profile");
  require_enumerable(measure.n);
  measure.atoms.assign(std::size_t{1} << measure.n, 0.0);
  if (!doc.at("s").is_null()) measure.s = doc.at("s").get<double>();
  for (const Json& atom : doc.at("atoms")) {
    const auto subset = atom.at("subset").get<std::vector<std::size_t>>();
    measure[profile.mask_of_original(subset)] = atom.at("prob").get<double>();
  }
  return measure;
}

template <Scalar Real>
Json to_json(const BoundReport<Real>& report) {
  return Json{{"k", report.k},
              {"exact", to_double(report.exact_mutual)},
              {"lower", to_double(report.sharp_lower)},
              {"upper", to_double(report.sharp_upper)},
              {"s_at_lower", to_double(report.s_at_lower)},
              {"s_at_upper", to_double(report.s_at_upper)},
              {"coefficient", coefficient_to_json(report.coefficient)}};
}

inline BoundReport<double> bound_report_from_json(const Json& doc) {
  BoundReport<double> report;
  report.k = doc.at("k").get<long>();
  report.exact_mutual = doc.at("exact").get<double>();
  report.sharp_lower = doc.at("lower").get<double>();
  report.sharp_upper = doc.at("upper").get<double>();
  report.s_at_lower = doc.at("s_at_lower").get<double>();
  report.s_at_upper = doc.at("s_at_upper").get<double>();
  report.coefficient = coefficient_from_json(doc.at("coefficient"));
  return report;
}

template <Scalar Real>
Json to_json(const VerificationReport<Real>& report, const BasicMarginalProfile<Real>& profile) {
  Json residuals = Json::array();
  for (const Real& r : report.marginal_residuals) residuals.push_back(to_double(r));
  Json violations = Json::array();
  for (const LemmaViolation& v : report.lemma_violations) {
    violations.push_back(Json{{"check", v.check}, {"witness", profile.original_indices(v.witness)}});
  }
  return Json{{"passed", report.passed()},
              {"normalization_residual", to_double(report.normalization_residual)},
              {"min_atom", to_double(report.min_atom)},
              {"marginal_residuals", std::move(residuals)},
              {"max_product_rule_residual", to_double(report.max_product_rule_residual)},
              {"independence_order", report.independence_order},
              {"lemma_violations", std::move(violations)}};
}

}  // namespace nwise

#endif  // NWISE_SERIALIZE_HPP

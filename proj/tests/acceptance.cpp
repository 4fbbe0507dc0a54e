// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Run from ctest as the "acceptance" test.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "nwise/bounds.hpp"
#include "nwise/cli.hpp"
#include "nwise/format.hpp"
#include "nwise/oracle.hpp"

using namespace nwise;

namespace {

constexpr std::uint64_t kSeed = 20221103;
constexpr std::size_t kProfiles = 200;
constexpr std::size_t kMaxN = 12;
constexpr std::size_t kGrid = 11;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  std::string id;
  std::string title;
  bool pass = true;
  std::string detail;
};

std::vector<Outcome> results;

void report(Outcome o) {
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << o.id << "  " << o.title;
  if (!o.detail.empty()) std::cout << ": " << o.detail;
  std::cout << std::endl;
  results.push_back(std::move(o));
}

std::string fmt(double x) { return format_scientific(x, 3); }
std::string fmt(const Rational& x) { return format_scientific(x, 6); }

std::string describe_profile(const MarginalProfile& p) {
  std::ostringstream out;
  out << '(';
  const auto v = p.original_values();
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  out << ')';
  return out.str();
}

std::vector<MarginalProfile> seeded_profiles() {
  std::mt19937_64 rng(kSeed);
  std::uniform_int_distribution<std::size_t> pick_n(2, kMaxN);
  std::vector<MarginalProfile> out;
  for (std::size_t i = 0; i < kProfiles; ++i) {
    out.push_back(MarginalProfile::from_raw(random_decimal_marginals(rng, pick_n(rng))));
  }
  return out;
}

// ------------------------------------------------------------------ 1

std::vector<std::vector<std::string>> read_golden(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

void criterion_table() {
  std::size_t matched = 0, total = 0, makarov_deviations = 0;
  std::string first_miss;
  double worst_time = 0;
  bool rational_matches = true;
  for (int t = 1; t <= 2; ++t) {
    const auto spec = *cli::table_preset("paper-table-" + std::to_string(t));
    const auto golden = read_golden(std::string(NWISE_TEST_DATA) + "/table" + std::to_string(t) +
                                    "_sharp.csv");
    const auto start = Clock::now();
    const auto table = cli::compute_table(spec, false, 5);
    worst_time = std::max(worst_time, seconds_since(start));
    const auto exact_table = cli::compute_table(spec, true, 5);
    makarov_deviations += table.notes.size();

    for (const auto& row : golden) {
      const std::size_t level =
          std::find(spec.levels.begin(), spec.levels.end(), row[0]) - spec.levels.begin();
      std::size_t r = 0;
      while (r < spec.rows.size() && row[1] != cli::row_name(spec.rows[r])) ++r;
      for (std::size_t c = 2; c < row.size(); ++c) {
        ++total;
        const std::string& got = table.cells.at(level).at(r).at(c - 2);
        if (got == row[c]) {
          ++matched;
        } else if (first_miss.empty()) {
          first_miss = "a=" + row[0] + " " + row[1] + " k=" + std::to_string(spec.k_min + long(c) - 2) +
                       " got " + got + " want " + row[c];
        }
        if (exact_table.cells.at(level).at(r).at(c - 2) != row[c]) rational_matches = false;
      }
    }
  }
  std::ostringstream d;
  d << matched << "/" << total << " sharp and exact cells match (rational mode "
    << (rational_matches ? "matches too" : "DIFFERS") << "), slowest table " << worst_time * 1e3
    << " ms; " << makarov_deviations << " Makarov cells differ from the published ones (exempt)";
  if (!first_miss.empty()) d << "; first miss " << first_miss;
  report({"1", "table reproduction", matched == 120 && total == 120 && rational_matches && worst_time < 1.0,
          d.str()});
}

// ------------------------------------------------------------------ 2

void criterion_example() {
  const auto p = to_exact(MarginalProfile::from_raw(std::vector<double>(6, 0.1)));
  const auto c = lll_comparison(p);
  const auto f = lll_comparison(MarginalProfile::from_raw(std::vector<double>(6, 0.1)));
  // 0.53144 and 0.262144 in lowest terms.
  const bool exact_ok = c.sharp_no_bad_event == Rational(6643, 12500) &&
                        c.product_bound == Rational(4096, 15625);
  const bool float_ok = format_scientific(f.sharp_no_bad_event, 6) == "5.31440e-01" &&
                        format_scientific(f.product_bound, 6) == "2.62144e-01";
  report({"2", "local lemma example", exact_ok && float_ok && c.positivity,
          "sharp " + format_scientific(c.sharp_no_bad_event, 6) + ", product " +
              format_scientific(c.product_bound, 6)});
}

// ------------------------------------------------------------------ 3

void criterion_interval() {
  bool ok = true;
  std::string detail = "n = 2..16 exact";
  for (std::size_t n = 2; n <= 16; ++n) {
    const auto p = to_exact(MarginalProfile::from_raw(std::vector<double>(n, 0.5)));
    const auto interval = s_interval(p);
    Rational expected(1);
    for (std::size_t i = 0; i < n; ++i) expected /= 2;
    if (interval.s_min != -expected || interval.s_max != expected || interval.p != (n - 1) / 2 ||
        interval.m != n / 2) {
      ok = false;
      detail = "n = " + std::to_string(n) + " gives [" + interval.s_min.get_str() + ", " +
               interval.s_max.get_str() + "], p=" + std::to_string(interval.p) +
               ", m=" + std::to_string(interval.m);
      break;
    }
  }
  report({"3", "uniform one-half interval", ok, detail});
}

// ------------------------------------------------------------------ 4

template <Scalar Real>
bool tail_matches(const Real& enumerated, const Real& linear, double& worst_rel) {
  if constexpr (ScalarTraits<Real>::exact) {
    return enumerated == linear;
  } else {
    const double diff = std::fabs(enumerated - linear);
    const double scale = std::max({1.0, std::fabs(enumerated), std::fabs(linear)});
    if (diff > 0) {
      const double rel = diff / std::max(std::fabs(enumerated), std::fabs(linear));
      worst_rel = std::max(worst_rel, std::isfinite(rel) ? rel : 0.0);
    }
    return diff <= 1e-12 * scale;
  }
}

// Whether a scan extreme located at `found` is at the endpoint predicted
// by the parity of k. Rational mode compares locations; floating mode
// compares the tail values there, since rounding can break exact ties.
template <Scalar Real>
bool at_endpoint(const BasicMarginalProfile<Real>& p, long k, const Real& found, const Real& predicted,
                 const SInterval<Real>& interval) {
  if (interval.collapsed || found == predicted) return true;
  if constexpr (ScalarTraits<Real>::exact) {
    return false;
  } else {
    return approx_equal(probability_at_s(p, k, found), probability_at_s(p, k, predicted));
  }
}

template <Scalar Real>
Outcome oracle_equivalence(const std::vector<MarginalProfile>& profiles, const char* mode) {
  const auto start = Clock::now();
  std::size_t measures = 0, tail_checks = 0, scans = 0, failures = 0;
  double worst_rel = 0;
  std::string first;
  auto fail = [&](const std::string& what, const MarginalProfile& p) {
    if (failures++ == 0) first = what + " at " + describe_profile(p);
  };
  for (const auto& raw : profiles) {
    BasicMarginalProfile<Real> p = [&] {
      if constexpr (ScalarTraits<Real>::exact) return to_exact(raw);
      else return raw;
    }();
    const long n = static_cast<long>(p.size());
    const auto interval = s_interval(p);
    for (const Real& s : s_grid(interval, kGrid)) {
      const auto measure = build_measure(p, s);
      ++measures;
      if (!verify_measure(measure, p).passed()) fail("verify_measure", raw);
      for (long k = 0; k <= n; ++k) {
        ++tail_checks;
        if (!tail_matches(enumerate_tail(measure, k), probability_at_s(p, k, s), worst_rel)) {
          fail("tail k=" + std::to_string(k) + " s=" + format_scientific(s, 5), raw);
        }
      }
    }
    for (long k = 1; k <= n; ++k) {
      ++scans;
      const auto scan = scan_sharpness(p, k, kGrid);
      const auto bounds = sharp_bounds(p, k);
      if (!(approx_equal(scan.empirical_min, bounds.sharp_lower) &&
            approx_equal(scan.empirical_max, bounds.sharp_upper))) {
        fail("scan extremes k=" + std::to_string(k), raw);
      }
      if (!at_endpoint(p, k, scan.argmin_s, bounds.s_at_lower, interval) ||
          !at_endpoint(p, k, scan.argmax_s, bounds.s_at_upper, interval)) {
        fail("extreme location k=" + std::to_string(k), raw);
      }
    }
  }
  std::ostringstream d;
  d << profiles.size() << " profiles, " << measures << " measures, " << tail_checks << " tail checks, "
    << scans << " scans";
  if constexpr (!ScalarTraits<Real>::exact) d << ", worst relative tail gap " << fmt(worst_rel);
  d << ", " << seconds_since(start) << " s";
  if (failures) d << "; " << failures << " failures, first: " << first;
  return {std::string("4") + (ScalarTraits<Real>::exact ? "a" : "b"),
          std::string("oracle equivalence, ") + mode, failures == 0, d.str()};
}

// ------------------------------------------------------------------ 5

void criterion_extremal(const std::vector<MarginalProfile>& profiles) {
  std::size_t lemma_fail = 0, prop_fail = 0;
  for (const auto& raw : profiles) {
    const auto p = to_exact(raw);
    if (!verify_extremal_atoms(p)) ++lemma_fail;
    const std::size_t pp = invariant_p(p), mm = invariant_m(p);
    if (mm != pp && mm != pp + 1) ++prop_fail;
  }
  report({"5", "extremal atoms and m in {p, p+1}", lemma_fail == 0 && prop_fail == 0,
          std::to_string(profiles.size()) + " profiles, " + std::to_string(lemma_fail) +
              " lemma failures, " + std::to_string(prop_fail) + " invariant failures"});
}

// ------------------------------------------------------------------ 6

Rational min_atom_at(const std::vector<Rational>& product, const Rational& s) {
  Rational lowest = 1;
  for (std::size_t mask = 0; mask < product.size(); ++mask) {
    const Rational atom = SubsetMask(mask).odd() ? Rational(product[mask] - s) : Rational(product[mask] + s);
    if (atom < lowest) lowest = atom;
  }
  return lowest;
}

void criterion_boundary(const std::vector<MarginalProfile>& profiles) {
  const Rational rel("1/1000000000");
  std::size_t zero_fail = 0, beyond_fail = 0, collapsed = 0;
  std::string first;
  for (const auto& raw : profiles) {
    const auto p = to_exact(raw);
    const auto interval = s_interval(p);
    if (interval.collapsed) ++collapsed;
    const auto at_max = build_measure(p, interval.s_max);
    const auto at_min = build_measure(p, interval.s_min);
    if (at_max[SubsetMask::prefix(2 * interval.p + 1)] != 0 || at_min[SubsetMask::prefix(2 * interval.m)] != 0) {
      if (zero_fail++ == 0) first = "no zero atom at " + describe_profile(raw);
    }
    const auto product = product_atoms(p);
    const Rational up = interval.s_max == 0 ? rel : Rational(abs(interval.s_max) * rel);
    const Rational down = interval.s_min == 0 ? rel : Rational(abs(interval.s_min) * rel);
    if (min_atom_at(product, interval.s_max + up) >= 0 || min_atom_at(product, interval.s_min - down) >= 0) {
      if (beyond_fail++ == 0 && first.empty()) first = "no negative atom beyond " + describe_profile(raw);
    }
  }
  std::string d = std::to_string(profiles.size()) + " profiles (" + std::to_string(collapsed) +
                  " collapsed), zero-atom failures " + std::to_string(zero_fail) +
                  ", overshoot failures " + std::to_string(beyond_fail);
  if (!first.empty()) d += "; first: " + first;
  report({"6", "boundary feasibility", zero_fail == 0 && beyond_fail == 0, d});
}

// ------------------------------------------------------------------ 7

void criterion_envelope(const std::vector<MarginalProfile>& profiles) {
  std::size_t checks = 0, printed_fail = 0, conv_fail = 0, chain_fail = 0, printed_profiles = 0;
  std::size_t consistency_fail = 0, bonferroni_checked = 0, bonferroni_fail = 0;
  std::string printed_example, conv_example;
  const auto same = [](const BoundReport<Rational>& a, const BoundReport<Rational>& b) {
    return a.k == b.k && a.exact_mutual == b.exact_mutual && a.sharp_lower == b.sharp_lower &&
           a.sharp_upper == b.sharp_upper && a.s_at_lower == b.s_at_lower &&
           a.s_at_upper == b.s_at_upper && a.coefficient == b.coefficient && a.collapsed == b.collapsed;
  };
  for (const auto& raw : profiles) {
    const auto p = to_exact(raw);
    const long n = static_cast<long>(p.size());
    bool profile_failed = false;
    for (long k = 1; k <= n; ++k) {
      ++checks;
      const auto b = sharp_bounds(p, k);
      const auto mk = makarov_bounds(p, k);
      if (!(b.sharp_lower <= b.exact_mutual && b.exact_mutual <= b.sharp_upper)) ++chain_fail;
      if (!(mk.lower <= b.sharp_lower && b.sharp_upper <= mk.upper)) {
        ++printed_fail;
        profile_failed = true;
        if (printed_example.empty()) {
          printed_example = describe_profile(raw) + " k=" + std::to_string(k) + ": makarov [" +
                            fmt(mk.lower) + ", " + fmt(mk.upper) + "] vs sharp [" + fmt(b.sharp_lower) +
                            ", " + fmt(b.sharp_upper) + "]";
        }
      }
      if (!(mk.convolution_lower <= b.sharp_lower && b.sharp_upper <= mk.convolution_upper)) {
        if (conv_fail++ == 0) conv_example = describe_profile(raw) + " k=" + std::to_string(k);
      }
    }
    if (profile_failed) ++printed_profiles;

    if (!same(union_bounds(p), sharp_bounds(p, 1))) ++consistency_fail;
    if (!same(intersection_bounds(p), sharp_bounds(p, n))) ++consistency_fail;
    const auto bonf = bonferroni_applicable(p);
    if (bonf.kind != BonferroniCase::neither) {
      ++bonferroni_checked;
      const auto u = union_bounds(p);
      const Rational& side = bonf.kind == BonferroniCase::upper_coincides ? u.sharp_upper : u.sharp_lower;
      if (!bonf.value || *bonf.value != side) ++bonferroni_fail;
    }
  }
  report({"7a", "envelope with Makarov bounds as printed", printed_fail == 0 && chain_fail == 0,
          std::to_string(printed_fail) + "/" + std::to_string(checks) + " (profile, k) pairs violate it in " +
              std::to_string(printed_profiles) + "/" + std::to_string(profiles.size()) + " profiles" +
              (printed_example.empty() ? "" : "; e.g. " + printed_example)});
  report({"7b", "envelope with two-point convolution Makarov bounds", conv_fail == 0 && chain_fail == 0,
          std::to_string(conv_fail) + "/" + std::to_string(checks) + " violations" +
              (conv_example.empty() ? "" : "; e.g. " + conv_example)});
  report({"7c", "union, intersection and Bonferroni consistency",
          consistency_fail == 0 && bonferroni_fail == 0,
          std::to_string(consistency_fail) + " field mismatches, Bonferroni " +
              std::to_string(bonferroni_fail) + "/" + std::to_string(bonferroni_checked) + " failures"});
}

// ------------------------------------------------------------------ 8

void criterion_dp(const std::vector<MarginalProfile>& profiles) {
  std::size_t mismatches = 0, checks = 0;
  for (const auto& raw : profiles) {
    const auto p = to_exact(raw);
    const auto independent = build_measure(p, Rational(0));
    for (long k = 0; k <= static_cast<long>(p.size()); ++k) {
      ++checks;
      if (tail_probability_dp(p, k) != enumerate_tail(independent, k)) ++mismatches;
    }
  }
  const auto big = MarginalProfile::from_raw(std::vector<double>(10000, 0.3));
  const auto start = Clock::now();
  const auto tails = tail_probabilities(big);
  const double elapsed = seconds_since(start);
  bool sane = tails.size() == 10001 && tails.front() == 1.0;
  for (std::size_t k = 1; k < tails.size(); ++k) sane = sane && tails[k] <= tails[k - 1] && tails[k] >= 0;

  std::ostringstream d;
  d << mismatches << "/" << checks << " exact mismatches; n = 10000 sweep " << elapsed
    << " s (monotone " << (sane ? "yes" : "no") << ", P(S >= 3000) = " << fmt(tails[3000]) << ")";
  report({"8", "tail recursion", mismatches == 0 && sane && elapsed < 5.0, d.str()});
}

}  // namespace

int main() {
  std::cout << "acceptance: seed " << kSeed << ", " << kProfiles << " profiles with n in [2, " << kMaxN
            << "], " << kGrid << " s values each" << std::endl;
  const auto profiles = seeded_profiles();

  criterion_table();
  criterion_example();
  criterion_interval();
  report(oracle_equivalence<double>(profiles, "floating mode"));
  report(oracle_equivalence<Rational>(profiles, "rational mode"));
  criterion_extremal(profiles);
  criterion_boundary(profiles);
  criterion_envelope(profiles);
  criterion_dp(profiles);

  std::size_t failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << "summary: " << results.size() - failed << " passed, " << failed << " failed" << std::endl;
  return failed == 0 ? 0 : 1;
}

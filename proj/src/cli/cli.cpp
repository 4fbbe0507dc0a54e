#include "nwise/cli.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "nwise/bounds.hpp"
#include "nwise/format.hpp"
#include "nwise/marginals.hpp"
#include "nwise/measure_family.hpp"
#include "nwise/oracle.hpp"
#include "nwise/serialize.hpp"

namespace nwise::cli {
namespace {

struct Options {
  std::string marginals;
  std::string input;
  std::string format = "text";
  int precision = 5;
  bool rational = false;

  std::optional<long> k;
  bool all_k = false;

  std::optional<double> s;
  std::string s_endpoint;

  std::string preset;
  std::size_t table_n = 8;
  std::string levels;
  std::string k_range;

  std::size_t grid = 0;  // 0: command default
  std::uint64_t seed = 20221103;
  std::size_t count = 200;
  std::size_t max_n = 12;
};

OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  return OutputFormat::text;
}

MarginalProfile read_profile(const Options& opts) {
  if (!opts.marginals.empty() && !opts.input.empty()) {
    throw ValidationError("give either --marginals or --input, not both");
  }
  if (!opts.input.empty()) return load_profile(opts.input, format_for_path(opts.input));
  if (!opts.marginals.empty()) return MarginalProfile::from_raw(parse_marginal_list(opts.marginals));
  throw ValidationError("no marginals given: use --marginals LIST or --input PATH");
}

template <Scalar Real>
std::string num(const Real& x, const Options& opts) {
  return format_scientific(x, opts.precision);
}

template <Scalar Real>
std::string subset_text(const BasicMarginalProfile<Real>& profile, SubsetMask mask) {
  std::string out = "{";
  const auto members = profile.original_indices(mask);
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(members[i]);
  }
  return out + "}";
}

// ---------------------------------------------------------------- bound

std::string coefficient_text(const BigInt& c, const Options& opts) {
  const std::string digits = c.get_str();
  return digits.size() <= 18 ? digits : format_scientific(Rational(c), opts.precision);
}

template <Scalar Real>
int cmd_bound(const BasicMarginalProfile<Real>& profile, const Options& opts, std::ostream& out) {
  std::vector<long> ks;
  if (opts.all_k) {
    for (long k = 1; k <= static_cast<long>(profile.size()); ++k) ks.push_back(k);
  } else if (opts.k) {
    ks.push_back(*opts.k);
  } else {
    throw ValidationError("bound needs --k INT or --all-k");
  }
  std::vector<BoundReport<Real>> reports;
  for (long k : ks) reports.push_back(sharp_bounds(profile, k));

  const OutputFormat format = parse_format(opts.format);
  if (format == OutputFormat::json) {
    if (!opts.all_k) {
      out << to_json(reports.front()).dump(2) << '\n';
    } else {
      Json arr = Json::array();
      for (const auto& r : reports) arr.push_back(to_json(r));
      out << arr.dump(2) << '\n';
    }
    return 0;
  }
  if (format == OutputFormat::csv) {
    out << "k,exact,lower,upper\n";
    for (const auto& r : reports) {
      out << r.k << ',' << num(r.exact_mutual, opts) << ',' << num(r.sharp_lower, opts) << ','
          << num(r.sharp_upper, opts) << '\n';
    }
    return 0;
  }

  const SInterval<Real> interval = s_interval(profile);
  out << "n = " << profile.size() << ", p = " << interval.p << ", m = " << interval.m
      << ", s in [" << num(interval.s_min, opts) << ", " << num(interval.s_max, opts) << "]\n";
  if (interval.collapsed) {
    out << "interval collapsed to s = 0: both bounds are attained by the product measure\n";
  }
  for (const auto& r : reports) {
    out << "k = " << r.k << ": lower " << num(r.sharp_lower, opts) << "  exact "
        << num(r.exact_mutual, opts) << "  upper " << num(r.sharp_upper, opts) << "  (C = "
        << coefficient_text(r.coefficient, opts) << ", lower at s = " << num(r.s_at_lower, opts)
        << ", upper at s = " << num(r.s_at_upper, opts) << ")\n";
    if (profile.size() >= 2 && r.k >= 1) {
      const MakarovBounds<Real> mk = makarov_bounds(profile, r.k);
      out << "        makarov: lower " << num(mk.lower, opts) << "  upper " << num(mk.upper, opts);
      if (mk.variants_differ()) {
        out << "  (two-point convolution: lower " << num(mk.convolution_lower, opts) << "  upper "
            << num(mk.convolution_upper, opts) << ")";
      }
      out << '\n';
    }
  }
  return 0;
}

// ---------------------------------------------------------------- interval

template <Scalar Real>
int cmd_interval(const BasicMarginalProfile<Real>& profile, const Options& opts, std::ostream& out) {
  const SInterval<Real> interval = s_interval(profile);
  switch (parse_format(opts.format)) {
    case OutputFormat::json:
      out << to_json(interval).dump(2) << '\n';
      break;
    case OutputFormat::csv:
      out << "s_min,s_max,p,m\n"
          << num(interval.s_min, opts) << ',' << num(interval.s_max, opts) << ',' << interval.p
          << ',' << interval.m << '\n';
      break;
    case OutputFormat::text:
      out << '[' << num(interval.s_min, opts) << ", " << num(interval.s_max, opts)
          << "], p=" << interval.p << ", m=" << interval.m
          << (interval.collapsed ? " (collapsed)" : "") << '\n';
      break;
  }
  return 0;
}

// ---------------------------------------------------------------- measure

template <Scalar Real>
Real to_real(double x) {
  if constexpr (std::same_as<Real, double>) {
    return x;
  } else {
    Rational r;
    const bool negative = x < 0;
    if (!exact_rational(negative ? -x : x, r)) {
      throw ValidationError("--s must be a decimal with denominator <= 1e6 in rational mode");
    }
    return negative ? Rational(-r) : r;
  }
}

template <Scalar Real>
int cmd_measure(const BasicMarginalProfile<Real>& profile, const Options& opts, std::ostream& out) {
  require_enumerable(profile.size());
  const SInterval<Real> interval = s_interval(profile);
  Real s(0);
  if (opts.s && !opts.s_endpoint.empty()) throw ValidationError("give either --s or --s-endpoint");
  if (opts.s) {
    s = to_real<Real>(*opts.s);
  } else if (opts.s_endpoint == "min") {
    s = interval.s_min;
  } else if (opts.s_endpoint == "max") {
    s = interval.s_max;
  } else if (opts.s_endpoint == "zero" || opts.s_endpoint.empty()) {
    s = Real(0);
  } else {
    throw ValidationError("--s-endpoint must be min, max or zero");
  }
  const AtomicMeasure<Real> measure = build_measure(profile, s);
  switch (parse_format(opts.format)) {
    case OutputFormat::json:
      out << to_json(measure, profile).dump(2) << '\n';
      break;
    case OutputFormat::csv:
      out << "subset,prob\n";
      for (std::size_t mask = 0; mask < measure.atoms.size(); ++mask) {
        out << '"' << subset_text(profile, SubsetMask(mask)) << "\"," << num(measure.atoms[mask], opts)
            << '\n';
      }
      break;
    case OutputFormat::text:
      out << "n = " << measure.n << ", s = " << num(s, opts) << '\n';
      for (std::size_t mask = 0; mask < measure.atoms.size(); ++mask) {
        std::string label = subset_text(profile, SubsetMask(mask));
        if (label.size() < 12) label.resize(12, ' ');
        out << label << ' ' << num(measure.atoms[mask], opts) << '\n';
      }
      break;
  }
  return 0;
}

// ---------------------------------------------------------------- verify

template <Scalar Real>
struct VerifySummary {
  std::size_t measures = 0;
  Real worst_normalization{0};
  Real worst_marginal{0};
  Real worst_product_rule{0};
  Real min_atom{1};
  std::size_t min_order = 0;
  Real worst_tail_gap{0};
  Real worst_bound_gap{0};
  bool measures_pass = true;
  bool endpoints_ok = true;
  bool extremal_ok = true;
  bool kernel_ok = true;
  bool invariant_ok = true;
  std::vector<std::string> failures;

  bool passed() const {
    return measures_pass && endpoints_ok && extremal_ok && kernel_ok && invariant_ok &&
           failures.empty();
  }
};

template <Scalar Real>
void verify_profile(const BasicMarginalProfile<Real>& profile, std::size_t grid_points,
                    VerifySummary<Real>& sum) {
  const std::size_t n = profile.size();
  require_enumerable(n);
  const SInterval<Real> interval = s_interval(profile);
  const std::vector<Real> grid = s_grid(interval, grid_points);
  if (sum.measures == 0) sum.min_order = n;

  std::vector<BoundReport<Real>> bounds;
  for (long k = 0; k <= static_cast<long>(n); ++k) bounds.push_back(sharp_bounds(profile, k));
  std::vector<Real> lo(n + 1), hi(n + 1), lo_s(n + 1), hi_s(n + 1);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const AtomicMeasure<Real> measure = build_measure(profile, grid[i]);
    const VerificationReport<Real> report = verify_measure(measure, profile);
    ++sum.measures;
    if (!report.passed()) {
      sum.measures_pass = false;
      std::string checks;
      for (const auto& v : report.lemma_violations) checks += " " + v.check;
      sum.failures.push_back("measure at s = " + format_scientific(grid[i], 5) + " failed:" + checks);
    }
    sum.worst_normalization = std::max<Real>(sum.worst_normalization, abs_value(report.normalization_residual));
    sum.worst_marginal = std::max<Real>(sum.worst_marginal, report.max_marginal_residual());
    sum.worst_product_rule = std::max<Real>(sum.worst_product_rule, report.max_product_rule_residual);
    sum.min_atom = std::min<Real>(sum.min_atom, report.min_atom);
    sum.min_order = std::min(sum.min_order, report.independence_order);

    const std::vector<Real> tails = enumerate_tails(measure);
    for (long k = 0; k <= static_cast<long>(n); ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const Real linear = probability_at_s(profile, k, grid[i]);
      sum.worst_tail_gap = std::max<Real>(sum.worst_tail_gap, abs_value(Real(tails[kk] - linear)));
      if (i == 0 || tails[kk] < lo[kk]) { lo[kk] = tails[kk]; lo_s[kk] = grid[i]; }
      if (i == 0 || tails[kk] > hi[kk]) { hi[kk] = tails[kk]; hi_s[kk] = grid[i]; }
    }
  }
  for (long k = 1; k <= static_cast<long>(n); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    sum.worst_bound_gap = std::max<Real>(sum.worst_bound_gap, abs_value(Real(lo[kk] - bounds[kk].sharp_lower)));
    sum.worst_bound_gap = std::max<Real>(sum.worst_bound_gap, abs_value(Real(hi[kk] - bounds[kk].sharp_upper)));
    // Endpoint location is only meaningful when the interval is not a point.
    if constexpr (ScalarTraits<Real>::exact) {
      if (!interval.collapsed && (lo_s[kk] != bounds[kk].s_at_lower || hi_s[kk] != bounds[kk].s_at_upper)) {
        sum.endpoints_ok = false;
        sum.failures.push_back("k = " + std::to_string(k) + ": extreme not at predicted endpoint");
      }
    }
  }
  if (!approx_equal(Real(lo[1] - bounds[1].sharp_lower), Real(0)) || sum.worst_bound_gap > ScalarTraits<Real>::tolerance()) {
    sum.endpoints_ok = false;
  }

  const ExtremalAtomCheck<Real> extremal = verify_extremal_atoms(profile);
  if (!extremal) {
    sum.extremal_ok = false;
    for (const auto& v : extremal.violations) sum.failures.push_back("extremal atoms: " + v.check);
  }
  if (!verify_kernel(n, interval.s_max) || !verify_kernel(n, interval.s_min)) sum.kernel_ok = false;
  if (interval.m != interval.p && interval.m != interval.p + 1) sum.invariant_ok = false;
}

template <Scalar Real>
void write_verify(const VerifySummary<Real>& sum, const std::string& header, const Options& opts,
                  std::ostream& out) {
  if (parse_format(opts.format) == OutputFormat::json) {
    Json doc{{"passed", sum.passed()},
             {"measures_checked", sum.measures},
             {"worst_normalization_residual", to_double(sum.worst_normalization)},
             {"worst_marginal_residual", to_double(sum.worst_marginal)},
             {"worst_product_rule_residual", to_double(sum.worst_product_rule)},
             {"min_atom", to_double(sum.min_atom)},
             {"min_independence_order", sum.min_order},
             {"worst_tail_gap", to_double(sum.worst_tail_gap)},
             {"worst_bound_gap", to_double(sum.worst_bound_gap)},
             {"extremal_atoms", sum.extremal_ok},
             {"kernel", sum.kernel_ok},
             {"m_in_p_p_plus_1", sum.invariant_ok},
             {"seed", opts.seed},
             {"failures", sum.failures}};
    out << doc.dump(2) << '\n';
    return;
  }
  const auto flag = [](bool ok) { return ok ? "ok" : "FAIL"; };
  out << header << '\n'
      << "  measures checked:              " << sum.measures << '\n'
      << "  worst normalization residual:  " << num(sum.worst_normalization, opts) << '\n'
      << "  worst marginal residual:       " << num(sum.worst_marginal, opts) << '\n'
      << "  worst product-rule residual:   " << num(sum.worst_product_rule, opts) << '\n'
      << "  minimum atom:                  " << num(sum.min_atom, opts) << '\n'
      << "  minimum independence order:    " << sum.min_order << '\n'
      << "  enumeration vs linear form:    " << num(sum.worst_tail_gap, opts) << '\n'
      << "  scan extremes vs sharp bounds: " << num(sum.worst_bound_gap, opts) << "  "
      << flag(sum.endpoints_ok) << '\n'
      << "  extremal atoms:                " << flag(sum.extremal_ok) << '\n'
      << "  kernel:                        " << flag(sum.kernel_ok) << '\n'
      << "  m in {p, p+1}:                 " << flag(sum.invariant_ok) << '\n';
  for (const auto& f : sum.failures) out << "  - " << f << '\n';
  out << (sum.passed() ? "PASS" : "FAIL") << '\n';
}

template <Scalar Real>
BasicMarginalProfile<Real> as_mode(const MarginalProfile& profile) {
  if constexpr (std::same_as<Real, double>) {
    return profile;
  } else {
    return to_exact(profile);
  }
}

template <Scalar Real>
int cmd_verify(const Options& opts, std::ostream& out) {
  VerifySummary<Real> sum;
  const char* mode = ScalarTraits<Real>::exact ? "rational" : "floating";
  if (!opts.marginals.empty() || !opts.input.empty()) {
    const BasicMarginalProfile<Real> profile = as_mode<Real>(read_profile(opts));
    const std::size_t grid = opts.grid ? opts.grid : kDefaultGridPoints;
    verify_profile(profile, grid, sum);
    write_verify(sum, "verify: n = " + std::to_string(profile.size()) + ", grid = " +
                          std::to_string(grid) + ", mode = " + mode,
                 opts, out);
  } else {
    if (opts.max_n < 2) throw ValidationError("--max-n must be at least 2");
    require_enumerable(opts.max_n);
    const std::size_t grid = opts.grid ? opts.grid : 11;
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> pick_n(2, opts.max_n);
    for (std::size_t i = 0; i < opts.count; ++i) {
      const MarginalProfile profile =
          MarginalProfile::from_raw(random_decimal_marginals(rng, pick_n(rng)));
      verify_profile(as_mode<Real>(profile), grid, sum);
    }
    write_verify(sum, "verify: " + std::to_string(opts.count) + " random profiles, n <= " +
                          std::to_string(opts.max_n) + ", seed = " + std::to_string(opts.seed) +
                          ", grid = " + std::to_string(grid) + ", mode = " + mode,
                 opts, out);
  }
  return sum.passed() ? 0 : 1;
}

// ---------------------------------------------------------------- table

TableSpec custom_table(const Options& opts) {
  TableSpec spec;
  spec.n = opts.table_n;
  if (spec.n < 1) throw ValidationError("--n must be positive");
  if (opts.levels.empty()) throw ValidationError("custom table needs --levels");
  std::stringstream ss(opts.levels);
  std::string level;
  while (std::getline(ss, level, ',')) spec.levels.push_back(level);
  if (opts.k_range.empty()) {
    spec.k_min = 1;
    spec.k_max = static_cast<long>(spec.n);
  } else {
    const auto colon = opts.k_range.find(':');
    try {
      spec.k_min = std::stol(opts.k_range.substr(0, colon));
      spec.k_max = colon == std::string::npos ? spec.k_min : std::stol(opts.k_range.substr(colon + 1));
    } catch (const std::exception&) {
      throw ValidationError("--k-range must look like A:B");
    }
  }
  return spec;
}

int cmd_table(const Options& opts, std::ostream& out) {
  TableSpec spec;
  if (!opts.preset.empty()) {
    auto preset = table_preset(opts.preset);
    if (!preset) throw ValidationError("unknown preset '" + opts.preset + "'");
    spec = *preset;
  } else {
    spec = custom_table(opts);
  }
  write_table(compute_table(spec, opts.rational, opts.precision), parse_format(opts.format), out);
  return 0;
}

template <template <class> class Command>
int dispatch(const Options& opts, std::ostream& out) {
  const MarginalProfile profile = read_profile(opts);
  if (opts.rational) return Command<Rational>::run(to_exact(profile), opts, out);
  return Command<double>::run(profile, opts, out);
}

template <class Real>
struct BoundCommand {
  static int run(const BasicMarginalProfile<Real>& p, const Options& o, std::ostream& out) {
    return cmd_bound(p, o, out);
  }
};
template <class Real>
struct IntervalCommand {
  static int run(const BasicMarginalProfile<Real>& p, const Options& o, std::ostream& out) {
    return cmd_interval(p, o, out);
  }
};
template <class Real>
struct MeasureCommand {
  static int run(const BasicMarginalProfile<Real>& p, const Options& o, std::ostream& out) {
    return cmd_measure(p, o, out);
  }
};

void add_common(CLI::App* cmd, Options& opts, bool with_input = true) {
  if (with_input) {
    cmd->add_option("--marginals", opts.marginals, "Comma-separated marginal probabilities");
    cmd->add_option("--input", opts.input, "CSV (one value per line) or JSON {\"marginals\": [...]}");
  }
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_option("--precision", opts.precision, "Significant digits in printed numbers")
      ->check(CLI::Range(1, 17));
  cmd->add_flag("--rational", opts.rational, "Exact rational arithmetic");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sharp bounds for n events under (n-1)-wise independence"};
  app.require_subcommand(1);
  Options opts;

  auto* bound = app.add_subcommand("bound", "Sharp bounds on P(at least k events occur)");
  add_common(bound, opts);
  bound->add_option("--k", opts.k, "Threshold k");
  bound->add_flag("--all-k", opts.all_k, "Report k = 1..n");

  auto* interval = app.add_subcommand("interval", "Feasible interval of the family parameter s");
  add_common(interval, opts);

  auto* measure = app.add_subcommand("measure", "Atom probabilities of one family member");
  add_common(measure, opts);
  measure->add_option("--s", opts.s, "Family parameter");
  measure->add_option("--s-endpoint", opts.s_endpoint, "min, max or zero")
      ->check(CLI::IsMember({"min", "max", "zero"}));

  auto* table = app.add_subcommand("table", "Uniform-marginal comparison tables");
  add_common(table, opts, false);
  table->add_option("--preset", opts.preset, "paper-table-1 or paper-table-2");
  table->add_option("--n", opts.table_n, "Number of events (custom table)");
  table->add_option("--levels", opts.levels, "Comma-separated uniform marginals (custom table)");
  table->add_option("--k-range", opts.k_range, "Inclusive k range A:B (custom table)");

  auto* verify = app.add_subcommand("verify", "Brute-force verification by atom enumeration");
  add_common(verify, opts);
  verify->add_option("--grid", opts.grid, "Number of s grid points")->check(CLI::Range(2, 1000000));
  verify->add_option("--seed", opts.seed, "Seed for random profiles (no input given)");
  verify->add_option("--count", opts.count, "Number of random profiles");
  verify->add_option("--max-n", opts.max_n, "Largest n for random profiles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (bound->parsed()) return dispatch<BoundCommand>(opts, out);
    if (interval->parsed()) return dispatch<IntervalCommand>(opts, out);
    if (measure->parsed()) return dispatch<MeasureCommand>(opts, out);
    if (table->parsed()) return cmd_table(opts, out);
    if (verify->parsed()) {
      return opts.rational ? cmd_verify<Rational>(opts, out) : cmd_verify<double>(opts, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace nwise::cli

#include "spdc/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "spdc/constants.hpp"
#include "spdc/errors.hpp"
#include "spdc/parallel.hpp"
#include "spdc/spatial.hpp"
#include "spdc/spectra.hpp"
#include "spdc/temporal.hpp"

namespace spdc {

namespace fs = std::filesystem;
using io::Cell;
using io::ColumnKind;
using io::Table;

const Table& ScenarioResult::table(const std::string& name) const
{
    for (const auto& [n, t] : tables)
        if (n == name)
            return t;
    throw std::out_of_range("no table '" + name + "'");
}

std::vector<double> column(const Table& t, const std::string& name)
{
    std::size_t c = 0;
    while (c < t.columns.size() && t.columns[c].name != name)
        ++c;
    if (c == t.columns.size())
        throw std::out_of_range("no column '" + name + "'");
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        if (const auto* d = std::get_if<double>(&row[c]))
            out.push_back(*d);
        else if (const auto* i = std::get_if<std::int64_t>(&row[c]))
            out.push_back(static_cast<double>(*i));
        else
            throw std::invalid_argument("column '" + name + "' is not numeric");
    }
    return out;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ParameterError("linear fit needs at least 2 matching points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw ParameterError("linear fit needs distinct x values");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
            ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

} // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ParameterError("rank correlation needs at least 2 matching points");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::isnan(x[i]) || std::isnan(y[i]))
            return std::numeric_limits<double>::quiet_NaN();
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double m = 0.5 * (n + 1.0);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - m) * (ry[i] - m);
        sxx += (rx[i] - m) * (rx[i] - m);
        syy += (ry[i] - m) * (ry[i] - m);
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
/// stream of the single explicit realization a scenario shows next to the ensemble
constexpr std::uint64_t realization_stream = 1ull << 32;

/// Physical setting shared by every scenario.
struct Setup {
    DispersionModel model;
    ProcessConfig process;
    double l0 = 0.0;
    double design_temperature = 297.0;
    std::size_t N_L = 700;
    SpectralGrid grid;
    RandomSource root;
    unsigned threads = 0;

    double dk0() const { return constants::pi / l0; }
};

Setup make_setup(const RunConfig& c)
{
    const bool scan = c.params.contains("design_temperature");
    const double T = scan ? c.number("design_temperature") : c.number("temperature");
    Setup s{DispersionModel(T), ProcessConfig{}, 0.0, T, 700, SpectralGrid{}, {c.seed, 0}, c.threads};
    s.process.pump_wavelength = c.number("pump_wavelength_nm") * 1e-9;
    s.process.validate();
    s.l0 = qpm_period(s.model, s.process.omega_s0(), s.process.omega_s0());
    if (c.params.contains("N_L"))
        s.N_L = c.count("N_L");
    if (c.params.contains("grid_points"))
        s.grid = SpectralGrid::centered(s.process.omega_s0(), c.number("grid_span"),
                                        c.count("grid_points"));
    return s;
}

Family random_family(const RunConfig& c)
{
    return c.params.contains("family") ? family_from_name(c.text("family")) : Family::rps;
}

StructureKind kind_of(Family f)
{
    return f == Family::weakly_random ? StructureKind::weakly_random : StructureKind::rps;
}

AnalyticFamily ensemble_family(const Setup& s, Family f, double sigma, std::size_t N_L)
{
    return AnalyticFamily{f, N_L, s.l0, sigma, 0.0};
}

StructureSpec random_spec(const Setup& s, Family f, double sigma)
{
    StructureSpec sp;
    sp.kind = kind_of(f);
    sp.N_L = s.N_L;
    sp.l0 = s.l0;
    sp.sigma = sigma;
    return sp;
}

PolingStructure chirped_structure(const Setup& s, double zeta)
{
    return gen_chirped(s.N_L, s.l0, zeta, s.dk0());
}

PolingStructure one_realization(const Setup& s, Family f, double sigma)
{
    Rng rng(substream(s.root, realization_stream));
    return generate_structure(random_spec(s, f, sigma), rng);
}

struct WidthRateValue {
    double width = nan;
    double rate = nan;
};

/// The same extraction the ensemble observables use; a width without half-maximum
/// crossings on the grid becomes NaN with a warning.
WidthRateValue observe(const DensitySlice& d, const std::string& what,
                       std::vector<std::string>& warnings)
{
    WidthRateValue v;
    v.rate = pair_rate(d);
    try {
        const auto sp = signal_spectrum(d);
        v.width = fwhm(sp.omega_s, sp.values);
    } catch (const DomainError& e) {
        warnings.push_back(what + ": " + e.what());
    }
    return v;
}

WidthRateValue observe(const PolingStructure& st, const Setup& s, const DispersionModel& model,
                       const std::string& what, std::vector<std::string>& warnings)
{
    return observe(joint_density(two_photon_amplitude(st, s.process, model, s.grid)), what,
                   warnings);
}

double standard_error(const EnsembleStats& st)
{
    const auto n = st.realizations - st.failures;
    return n > 1 ? std::sqrt(st.variance / static_cast<double>(n)) : 0.0;
}

double trace_width(const TemporalTrace& t, const std::string& what,
                   std::vector<std::string>& warnings)
{
    try {
        return fwhm(t.tau, t.values);
    } catch (const DomainError& e) {
        warnings.push_back(what + ": " + e.what());
        return nan;
    }
}

double dip_width(const TemporalTrace& t, const std::string& what,
                 std::vector<std::string>& warnings)
{
    try {
        return entanglement_time(t);
    } catch (const DomainError& e) {
        warnings.push_back(what + ": " + e.what());
        return nan;
    }
}

json num_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

void say(const Progress& p, const std::string& msg)
{
    if (p)
        p(msg);
}

Table pos_table(std::vector<std::string> position, std::vector<std::string> derived)
{
    std::vector<io::Column> cols;
    for (auto& n : position)
        cols.push_back({n, ColumnKind::position});
    for (auto& n : derived)
        cols.push_back({n, ColumnKind::derived});
    return Table(std::move(cols));
}

// ---------------------------------------------------------------------------

struct NLScan {
    std::vector<double> sigmas;
    std::vector<std::int64_t> counts;
    /// [sigma][N_L]
    std::vector<std::vector<WidthRate>> values;
};

NLScan scan_nl(const RunConfig& c, const Setup& s)
{
    NLScan r;
    r.sigmas = c.numbers("sigma_list");
    r.counts = c.integers("N_L_list");
    const auto fam = random_family(c);
    const std::size_t ns = r.sigmas.size(), nn = r.counts.size();
    std::vector<WidthRate> flat(ns * nn);
    parallel_for(flat.size(), s.threads, [&](std::size_t k) {
        const auto f = ensemble_family(s, fam, r.sigmas[k / nn], static_cast<std::size_t>(r.counts[k % nn]));
        flat[k] = analytic_width_rate(f, s.process, s.model, s.grid);
    });
    r.values.assign(ns, std::vector<WidthRate>(nn));
    for (std::size_t k = 0; k < flat.size(); ++k)
        r.values[k / nn][k % nn] = flat[k];
    return r;
}

Table nl_table(const NLScan& r)
{
    Table t({{"sigma", ColumnKind::position},
             {"N_L", ColumnKind::integer},
             {"rate", ColumnKind::derived},
             {"width", ColumnKind::derived}});
    for (std::size_t i = 0; i < r.sigmas.size(); ++i)
        for (std::size_t j = 0; j < r.counts.size(); ++j)
            t.add_row({r.sigmas[i], r.counts[j], r.values[i][j].rate, r.values[i][j].width});
    return t;
}

/// Widths nondecreasing in sigma at every N_L.
bool width_monotone(const NLScan& r)
{
    for (std::size_t j = 0; j < r.counts.size(); ++j)
        for (std::size_t i = 1; i < r.sigmas.size(); ++i)
            if (r.values[i][j].width < r.values[i - 1][j].width)
                return false;
    return true;
}

ScenarioResult run_rate_vs_nl(const RunConfig& c, const Setup& s, const Progress& p)
{
    say(p, "ensemble rate and width for " + std::to_string(c.numbers("sigma_list").size() *
                                                          c.integers("N_L_list").size()) +
               " points");
    const auto r = scan_nl(c, s);
    ScenarioResult out;
    out.tables.emplace_back("rate", nl_table(r));
    Table fit({{"sigma", ColumnKind::position},
               {"slope", ColumnKind::derived},
               {"intercept", ColumnKind::derived},
               {"r2", ColumnKind::derived},
               {"loglog_exponent", ColumnKind::derived}});
    json fits = json::array();
    double min_r2 = 1.0;
    for (std::size_t i = 0; i < r.sigmas.size(); ++i) {
        std::vector<double> x, y, lx, ly;
        for (std::size_t j = 0; j < r.counts.size(); ++j) {
            x.push_back(static_cast<double>(r.counts[j]));
            y.push_back(r.values[i][j].rate);
            lx.push_back(std::log(x.back()));
            ly.push_back(std::log(y.back()));
        }
        LinearFit f{nan, nan, nan}, lf{nan, nan, nan};
        if (x.size() >= 2) {
            f = linear_fit(x, y);
            lf = linear_fit(lx, ly);
            min_r2 = std::min(min_r2, f.r2);
        }
        fit.add_row({r.sigmas[i], f.slope, f.intercept, f.r2, lf.slope});
        fits.push_back({{"sigma", r.sigmas[i]}, {"r2", num_or_null(f.r2)},
                        {"loglog_exponent", num_or_null(lf.slope)}});
    }
    out.tables.emplace_back("fit", std::move(fit));
    out.summary = {{"fits", fits}, {"min_r2", min_r2},
                   {"width_nondecreasing_in_sigma", width_monotone(r)}};
    return out;
}

ScenarioResult run_width_vs_nl(const RunConfig& c, const Setup& s, const Progress& p)
{
    say(p, "ensemble width for " + std::to_string(c.numbers("sigma_list").size() *
                                                  c.integers("N_L_list").size()) +
               " points");
    const auto r = scan_nl(c, s);
    ScenarioResult out;
    out.tables.emplace_back("width", nl_table(r));
    out.summary = {{"width_nondecreasing_in_sigma", width_monotone(r)}};
    return out;
}

// ---------------------------------------------------------------------------

ScenarioResult run_sigma_zeta_match(const RunConfig& c, const Setup& s, const Progress& p)
{
    MatchSolverConfig solver;
    solver.sigma_min = c.number("sigma_min");
    solver.sigma_max = c.number("sigma_max");
    solver.N_L = s.N_L;
    solver.l0 = s.l0;
    const auto zetas = c.numbers("zeta_list");
    const auto which = c.text("match_target");
    std::vector<MatchTarget> targets;
    if (which != "equal-rate")
        targets.push_back(MatchTarget::equal_width);
    if (which != "equal-width")
        targets.push_back(MatchTarget::equal_rate);
    if (random_family(c) != Family::rps)
        throw ParameterError("sigma-zeta matching is defined for the rps family");

    Table t({{"target", ColumnKind::text},
             {"zeta", ColumnKind::position},
             {"matched", ColumnKind::integer},
             {"sigma", ColumnKind::derived},
             {"chirp_width", ColumnKind::derived},
             {"chirp_rate", ColumnKind::derived},
             {"rps_width", ColumnKind::derived},
             {"rps_rate", ColumnKind::derived},
             {"rate_ratio", ColumnKind::derived},
             {"width_ratio", ColumnKind::derived}});
    ScenarioResult out;
    json summary = json::object();
    for (auto target : targets) {
        say(p, "matching " + match_target_name(target) + " over " + std::to_string(zetas.size()) +
                   " chirp values");
        // one zeta per task keeps the scan parallel and each row independent
        std::vector<MatchRow> rows(zetas.size());
        parallel_for(zetas.size(), s.threads, [&](std::size_t k) {
            rows[k] = match_parameter(target, {zetas[k]}, solver, s.process, s.model, s.grid).at(0);
        });
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        std::size_t unmatched = 0;
        for (const auto& r : rows) {
            t.add_row({match_target_name(target), r.zeta, std::int64_t{r.matched ? 1 : 0},
                       r.matched ? r.sigma : nan, r.chirp_width, r.chirp_rate, r.rps_width,
                       r.rps_rate, r.rate_ratio, r.width_ratio});
            if (!r.matched) {
                ++unmatched;
                char buf[160];
                std::snprintf(buf, sizeof buf, "%s: no sigma in [%g, %g] m matches zeta = %g",
                              match_target_name(target).c_str(), solver.sigma_min,
                              solver.sigma_max, r.zeta);
                out.warnings.push_back(buf);
                continue;
            }
            const double q = target == MatchTarget::equal_width ? r.rate_ratio : r.width_ratio;
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        summary[match_target_name(target)] = {
            {"unmatched", unmatched},
            {target == MatchTarget::equal_width ? "rate_ratio_min" : "width_ratio_min",
             num_or_null(lo)},
            {target == MatchTarget::equal_width ? "rate_ratio_max" : "width_ratio_max",
             num_or_null(hi)}};
    }
    out.tables.emplace_back("match", std::move(t));
    out.summary = summary;
    return out;
}

// ---------------------------------------------------------------------------

json stats_json(const EnsembleStats& st)
{
    return {{"mean", st.mean},
            {"variance", st.variance},
            {"relative_fluctuation", st.relative_fluctuation},
            {"skewness", st.skewness},
            {"excess_kurtosis", st.excess_kurtosis},
            {"realizations", st.realizations},
            {"failures", st.failures}};
}

ScenarioResult run_histogram_study(const RunConfig& c, const Setup& s, const Progress& p)
{
    const auto fam = random_family(c);
    const double sigma = c.number("sigma");
    EnsembleOptions opt;
    opt.realizations = c.count("realizations");
    opt.histogram_bins = c.count("bins");
    opt.threads = s.threads;
    opt.max_failure_fraction = c.number("max_failure_fraction");
    say(p, std::to_string(opt.realizations) + " realizations at sigma = " + io::format_number(sigma, 6));
    const auto main = ensemble_run(random_spec(s, fam, sigma), s.process, s.model, s.grid,
                                   {rate_observable(), width_observable()},
                                   substream(s.root, 0), opt);
    ScenarioResult out;
    Table samples({{"realization", ColumnKind::integer},
                   {"rate", ColumnKind::derived},
                   {"width", ColumnKind::derived}});
    for (std::size_t r = 0; r < opt.realizations; ++r)
        samples.add_row({static_cast<std::int64_t>(r), main[0].samples[r], main[1].samples[r]});
    Table hist({{"observable", ColumnKind::text},
                {"bin", ColumnKind::integer},
                {"lower", ColumnKind::derived},
                {"upper", ColumnKind::derived},
                {"count", ColumnKind::integer}});
    for (const auto& st : main)
        for (std::size_t b = 0; b < st.counts.size(); ++b)
            hist.add_row({st.name, static_cast<std::int64_t>(b), st.bin_edges[b],
                          st.bin_edges[b + 1], static_cast<std::int64_t>(st.counts[b])});

    const auto fs_list = c.numbers("fluct_sigma_list");
    EnsembleOptions fopt = opt;
    fopt.realizations = c.count("fluct_realizations");
    Table fl({{"sigma", ColumnKind::position},
              {"rate_mean", ColumnKind::derived},
              {"rate_relative_fluctuation", ColumnKind::derived},
              {"width_mean", ColumnKind::derived},
              {"width_relative_fluctuation", ColumnKind::derived},
              {"width_failures", ColumnKind::integer}});
    std::vector<double> rate_fl, width_fl;
    for (std::size_t k = 0; k < fs_list.size(); ++k) {
        say(p, "fluctuations at sigma = " + io::format_number(fs_list[k], 6));
        const auto st = ensemble_run(random_spec(s, fam, fs_list[k]), s.process, s.model, s.grid,
                                     {rate_observable(), width_observable()},
                                     substream(s.root, k + 1), fopt);
        fl.add_row({fs_list[k], st[0].mean, st[0].relative_fluctuation, st[1].mean,
                    st[1].relative_fluctuation, static_cast<std::int64_t>(st[1].failures)});
        rate_fl.push_back(st[0].relative_fluctuation);
        width_fl.push_back(st[1].relative_fluctuation);
    }
    out.tables.emplace_back("samples", std::move(samples));
    out.tables.emplace_back("histogram", std::move(hist));
    out.tables.emplace_back("fluctuations", std::move(fl));
    auto decreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] < v[i - 1]))
                return false;
        return true;
    };
    out.summary = {{"sigma", sigma},
                   {"rate", stats_json(main[0])},
                   {"width", stats_json(main[1])},
                   {"rate_fluctuation_decreasing", decreasing(rate_fl)},
                   {"width_fluctuation_decreasing", decreasing(width_fl)}};
    if (main[1].failures > 0)
        out.warnings.push_back(std::to_string(main[1].failures) +
                               " realizations have no half-maximum crossing on the grid");
    return out;
}

// ---------------------------------------------------------------------------

std::vector<double> delay_grid(const RunConfig& c, const char* span_key, const char* points_key)
{
    return tau_grid(c.number(span_key) * 1e-15, c.count(points_key));
}

ScenarioResult run_hom_study(const RunConfig& c, const Setup& s, const Progress& p)
{
    const auto fam = random_family(c);
    const double sigma = c.number("sigma"), zeta = c.number("zeta");
    const auto tau = delay_grid(c, "tau_half_span_fs", "tau_points");
    ScenarioResult out;
    auto& w = out.warnings;

    say(p, "ensemble, chirped and single-realization dips");
    const auto ens = hom_trace_ensemble(ensemble_family(s, fam, sigma, s.N_L), s.process, s.model,
                                        s.grid, tau, s.threads);
    const auto chirp_slice = two_photon_amplitude(chirped_structure(s, zeta), s.process, s.model, s.grid);
    const auto cpps = hom_trace(chirp_slice, tau, s.threads);
    const auto one_slice =
        two_photon_amplitude(one_realization(s, fam, sigma), s.process, s.model, s.grid);
    const auto one = hom_trace(one_slice, tau, s.threads);
    Table tr = pos_table({"tau"}, {"R_ensemble", "R_chirped", "R_realization"});
    for (std::size_t k = 0; k < tau.size(); ++k)
        tr.add_row({tau[k], ens.values[k], cpps.values[k], one.values[k]});

    const double te_ens = dip_width(ens, "ensemble dip", w);
    const double te_cpps = dip_width(cpps, "chirped dip", w);
    const double te_one = dip_width(one, "realization dip", w);
    const auto ens_wr = analytic_width_rate(ensemble_family(s, fam, sigma, s.N_L), s.process,
                                            s.model, s.grid);

    say(p, std::to_string(c.count("realizations")) + " realization dips");
    const auto mc = hom_trace_mc(random_spec(s, fam, sigma), s.process, s.model, s.grid, tau,
                                 c.count("realizations"), substream(s.root, 0), s.threads);
    Table dips({{"realization", ColumnKind::integer}, {"entanglement_time", ColumnKind::derived}});
    std::vector<double> finite;
    for (std::size_t r = 0; r < mc.dip_widths.size(); ++r) {
        dips.add_row({static_cast<std::int64_t>(r), mc.dip_widths[r]});
        if (std::isfinite(mc.dip_widths[r]))
            finite.push_back(mc.dip_widths[r]);
    }

    // entanglement time against chirp, each rps ensemble matched in width
    const auto zetas = c.numbers("zeta_list");
    MatchSolverConfig solver;
    solver.sigma_min = c.number("sigma_min");
    solver.sigma_max = c.number("sigma_max");
    solver.N_L = s.N_L;
    solver.l0 = s.l0;
    say(p, "entanglement time for " + std::to_string(zetas.size()) + " chirp values");
    Table ez({{"zeta", ColumnKind::position},
              {"sigma_matched", ColumnKind::derived},
              {"chirped_width", ColumnKind::derived},
              {"chirped_entanglement_time", ColumnKind::derived},
              {"ensemble_entanglement_time", ColumnKind::derived},
              {"chirped_time_bandwidth", ColumnKind::derived}});
    std::vector<std::vector<Cell>> rows(zetas.size());
    std::vector<std::vector<std::string>> row_warn(zetas.size());
    parallel_for(zetas.size(), s.threads, [&](std::size_t k) {
        const auto m = match_parameter(MatchTarget::equal_width, {zetas[k]}, solver, s.process,
                                       s.model, s.grid).at(0);
        const auto ch = hom_trace(two_photon_amplitude(chirped_structure(s, zetas[k]), s.process,
                                                       s.model, s.grid),
                                  tau, 1);
        const double tc = dip_width(ch, "chirped dip", row_warn[k]);
        double te = nan;
        if (m.matched && fam == Family::rps) {
            const auto e = hom_trace_ensemble(ensemble_family(s, fam, m.sigma, s.N_L), s.process,
                                              s.model, s.grid, tau, 1);
            te = dip_width(e, "matched ensemble dip", row_warn[k]);
        }
        rows[k] = {zetas[k], m.matched ? m.sigma : nan, m.chirp_width, tc, te,
                   tc * m.chirp_width / (2.0 * constants::pi)};
    });
    for (std::size_t k = 0; k < zetas.size(); ++k) {
        ez.add_row(rows[k]);
        w.insert(w.end(), row_warn[k].begin(), row_warn[k].end());
    }

    out.tables.emplace_back("hom", std::move(tr));
    out.tables.emplace_back("dip_widths", std::move(dips));
    out.tables.emplace_back("entanglement_vs_zeta", std::move(ez));
    json spread = json::object();
    if (!finite.empty()) {
        const auto [mn, mx] = std::minmax_element(finite.begin(), finite.end());
        spread = {{"min", *mn}, {"max", *mx},
                  {"mean", std::accumulate(finite.begin(), finite.end(), 0.0) /
                               static_cast<double>(finite.size())}};
    }
    out.summary = {
        {"sigma", sigma},
        {"zeta", zeta},
        {"entanglement_time", {{"ensemble", num_or_null(te_ens)}, {"chirped", num_or_null(te_cpps)},
                               {"realization", num_or_null(te_one)}}},
        {"ensemble_time_bandwidth", num_or_null(te_ens * ens_wr.width / (2.0 * constants::pi))},
        {"ensemble_chirped_width_ratio", num_or_null(te_ens / te_cpps)},
        {"R_at_zero", {{"ensemble", ens.values[tau.size() / 2]},
                       {"chirped", cpps.values[tau.size() / 2]}}},
        {"R_at_edge", {{"ensemble", ens.values.front()}, {"chirped", cpps.values.front()}}},
        {"realization_dip_widths", spread},
        {"realization_dips_without_width", mc.dip_widths.size() - finite.size()}};
    return out;
}

// ---------------------------------------------------------------------------

ScenarioResult run_sumfreq_study(const RunConfig& c, const Setup& s, const Progress& p)
{
    const auto fam = random_family(c);
    const double sigma = c.number("sigma"), zeta = c.number("zeta");
    const auto tau = delay_grid(c, "sumfreq_half_span_fs", "sumfreq_points");
    ScenarioResult out;
    auto& w = out.warnings;

    say(p, "chirped structure traces");
    const auto chirp_slice = two_photon_amplitude(chirped_structure(s, zeta), s.process, s.model, s.grid);
    const auto ch_none = sumfreq_trace(chirp_slice, tau, CompensationMode::none, s.threads);
    const auto ch_quad = sumfreq_trace(chirp_slice, tau, CompensationMode::quadratic, s.threads);
    const auto ch_ls = sumfreq_trace(chirp_slice, tau, CompensationMode::quadratic_ls, s.threads);
    const auto ch_ideal = sumfreq_trace(chirp_slice, tau, CompensationMode::ideal, s.threads);
    say(p, "ensemble traces");
    const auto ens_none = sumfreq_trace_ensemble(ensemble_family(s, fam, sigma, s.N_L), s.process,
                                                 s.model, s.grid, tau, s.threads);
    const auto ens_ideal = sumfreq_trace_mc(random_spec(s, fam, sigma), s.process, s.model, s.grid,
                                            tau, CompensationMode::ideal, c.count("realizations"),
                                            substream(s.root, 0), s.threads);
    const auto one_slice =
        two_photon_amplitude(one_realization(s, fam, sigma), s.process, s.model, s.grid);
    const auto one_none = sumfreq_trace(one_slice, tau, CompensationMode::none, s.threads);
    const auto one_ideal = sumfreq_trace(one_slice, tau, CompensationMode::ideal, s.threads);

    Table tr = pos_table({"tau"}, {"chirped_none", "chirped_quadratic", "chirped_quadratic_ls",
                                   "chirped_ideal", "ensemble_none", "ensemble_ideal",
                                   "realization_none", "realization_ideal"});
    for (std::size_t k = 0; k < tau.size(); ++k)
        tr.add_row({tau[k], ch_none.trace.values[k], ch_quad.trace.values[k],
                    ch_ls.trace.values[k], ch_ideal.trace.values[k], ens_none.values[k],
                    ens_ideal.values[k], one_none.trace.values[k], one_ideal.trace.values[k]});

    const auto prof = spectral_phase(chirp_slice);
    const auto fit = fit_quadratic_phase(prof, s.process.omega_s0());
    Table ph = pos_table({"omega_s"}, {"phase", "weight"});
    for (std::size_t j = 0; j < prof.omega_s.size(); ++j)
        ph.add_row({prof.omega_s[j], prof.phase[j], prof.weights[j]});

    json widths = json::object();
    auto width = [&](const std::string& name, const TemporalTrace& t) {
        const double v = trace_width(t, name + " trace", w);
        widths[name] = num_or_null(v);
        return v;
    };
    width("chirped_none", ch_none.trace);
    const double wq = width("chirped_quadratic", ch_quad.trace);
    width("chirped_quadratic_ls", ch_ls.trace);
    const double wi = width("chirped_ideal", ch_ideal.trace);
    width("ensemble_none", ens_none);
    const double we = width("ensemble_ideal", ens_ideal);
    width("realization_none", one_none.trace);
    width("realization_ideal", one_ideal.trace);
    out.tables.emplace_back("sumfreq", std::move(tr));
    out.tables.emplace_back("phase", std::move(ph));
    out.summary = {{"sigma", sigma},
                   {"zeta", zeta},
                   {"correlation_time", widths},
                   {"quadratic_over_ideal", num_or_null(wq / wi)},
                   {"ensemble_over_chirped_ideal", num_or_null(we / wi)},
                   {"quadratic_fit", {{"c1", fit.c1}, {"c2", fit.c2},
                                      {"residual_rms", fit.residual_rms},
                                      {"c2_refined", ch_quad.compensation.c2}}}};
    return out;
}

// ---------------------------------------------------------------------------

Table map_table(const AngularDensityMap& m)
{
    Table t = pos_table({m.row_name, m.col_name}, {"value"});
    for (std::size_t r = 0; r < m.rows.size(); ++r)
        for (std::size_t cc = 0; cc < m.cols.size(); ++cc)
            t.add_row({m.rows[r], m.cols[cc], m.at(r, cc)});
    return t;
}

ScenarioResult run_spatial_study(const RunConfig& c, const Setup& s, const Progress& p)
{
    const auto fam = random_family(c);
    const double sigma = c.number("sigma"), zeta = c.number("zeta");
    SpatialGrids g;
    g.pump_band = c.number("pump_band_nm") * 1e-9;
    g.pump_band_points = c.count("pump_band_points");
    g.signal_span = c.number("grid_span");
    g.signal_points = c.count("signal_points");
    g.theta_s_max = c.number("theta_s_max");
    g.theta_s_points = c.count("theta_s_points");
    g.idler_points = c.count("idler_points");
    g.idler_extent = c.number("idler_extent");
    g.theta_i_max = c.number("profile_theta_max");
    g.theta_i_points = c.count("area_theta_points");
    g.phi_i_points = c.count("area_phi_points");
    g.validate();

    std::vector<std::pair<std::string, SpatialSource>> sources;
    sources.emplace_back("ensemble", ensemble_family(s, fam, sigma, s.N_L));
    sources.emplace_back("chirped", chirped_structure(s, zeta));
    if (c.flag("include_realization"))
        sources.emplace_back("realization", one_realization(s, fam, sigma));

    ScenarioResult out;
    ProcessConfig map_cfg = s.process;
    map_cfg.pump_dx = map_cfg.pump_dy = c.number("map_pump_width");
    ProcessConfig area_cfg = s.process;
    area_cfg.pump_dx = area_cfg.pump_dy = c.number("pump_width");
    const auto cut = signed_theta_grid(c.number("profile_theta_max"), c.count("profile_points"));

    std::vector<RadialProfile> radial, profiles;
    json splitting = json::object(), fwhm_json = json::object(), conv = json::object();
    std::vector<std::pair<std::string, Table>> maps, areas;
    std::vector<double> map_rows;
    for (const auto& [name, src] : sources) {
        say(p, name + ": signal map");
        const auto m = angular_spectral_density(src, map_cfg, s.model, g, s.threads);
        for (const auto& wmsg : m.warnings)
            out.warnings.push_back(name + " map: " + wmsg);
        map_rows = m.rows;
        radial.push_back(radial_photon_density(m));
        json split = nullptr;
        for (std::size_t r = 0; r < m.rows.size(); ++r)
            if (has_spectral_splitting(m, r)) {
                split = m.rows[r];
                break;
            }
        splitting[name] = split;
        maps.emplace_back("map_" + name, map_table(m));

        say(p, name + ": correlated area");
        const auto a = correlated_area(src, area_cfg, s.model, g, s.threads);
        for (const auto& wmsg : a.warnings)
            out.warnings.push_back(name + " area: " + wmsg);
        areas.emplace_back("area_" + name, map_table(a));
        auto prof = correlated_profile(src, area_cfg, s.model, g, cut, s.threads);
        for (const auto& wmsg : prof.warnings)
            out.warnings.push_back(name + " profile: " + wmsg);
        double fw = nan;
        try {
            fw = fwhm(prof.theta, prof.values);
        } catch (const DomainError& e) {
            out.warnings.push_back(name + " profile: " + e.what());
        }
        fwhm_json[name] = num_or_null(fw);
        conv[name] = {{"map", num_or_null(m.convergence_error)},
                      {"area", num_or_null(a.convergence_error)},
                      {"profile", num_or_null(prof.convergence_error)}};
        profiles.push_back(std::move(prof));
    }

    std::vector<std::string> names;
    for (const auto& src : sources)
        names.push_back(src.first);
    Table rad = pos_table({"theta_s"}, names);
    for (std::size_t r = 0; r < map_rows.size(); ++r) {
        std::vector<Cell> row{map_rows[r]};
        for (const auto& rp : radial)
            row.push_back(rp.values[r]);
        rad.add_row(std::move(row));
    }
    Table pr = pos_table({"theta_i"}, names);
    for (std::size_t k = 0; k < cut.size(); ++k) {
        std::vector<Cell> row{cut[k]};
        for (const auto& cp : profiles)
            row.push_back(cp.values[k]);
        pr.add_row(std::move(row));
    }

    const auto widths = c.numbers("pump_width_list");
    say(p, "correlated-area width for " + std::to_string(widths.size()) + " pump radii");
    const auto ki = s.model.wavenumber(s.process.omega_s0());
    std::vector<std::vector<CorrelatedWidth>> scans;
    for (std::size_t k = 0; k < 2; ++k)
        scans.push_back(correlated_width_scan(sources[k].second, s.process, s.model, g, widths, 3.0,
                                              c.count("profile_points"), s.threads));
    Table ws = pos_table({"pump_width"}, {"ensemble", "chirped", "transverse_estimate"});
    for (std::size_t k = 0; k < widths.size(); ++k)
        ws.add_row({widths[k], scans[0][k].width, scans[1][k].width,
                    2.0 * std::sqrt(2.0 * std::log(2.0)) / (ki * widths[k])});
    auto span_ratio = [](const std::vector<CorrelatedWidth>& v) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& e : v) {
            lo = std::min(lo, e.width);
            hi = std::max(hi, e.width);
        }
        return hi / lo;
    };

    for (auto& m : maps)
        out.tables.push_back(std::move(m));
    out.tables.emplace_back("radial", std::move(rad));
    for (auto& a : areas)
        out.tables.push_back(std::move(a));
    out.tables.emplace_back("correlated_profile", std::move(pr));
    out.tables.emplace_back("width_scan", std::move(ws));
    const double fe = fwhm_json["ensemble"].is_number() ? fwhm_json["ensemble"].get<double>() : nan;
    const double fc = fwhm_json["chirped"].is_number() ? fwhm_json["chirped"].get<double>() : nan;
    out.summary = {{"sigma", sigma},
                   {"zeta", zeta},
                   {"first_split_theta_s", splitting},
                   {"correlated_fwhm", fwhm_json},
                   {"ensemble_over_chirped_fwhm", num_or_null(fe / fc)},
                   {"width_scan_ratio", {{"ensemble", span_ratio(scans[0])},
                                         {"chirped", span_ratio(scans[1])}}},
                   {"convergence_error", conv}};
    return out;
}

// ---------------------------------------------------------------------------

ScenarioResult run_temperature_scan(const RunConfig& c, const Setup& s, const Progress& p)
{
    const auto fam = random_family(c);
    const double sigma = c.number("sigma"), zeta = c.number("zeta");
    const auto temps = c.numbers("T_list");
    const auto one = one_realization(s, fam, sigma);
    const auto ch = chirped_structure(s, zeta);
    const auto ens = ensemble_family(s, fam, sigma, s.N_L);
    say(p, std::to_string(temps.size()) + " temperatures");
    std::vector<std::vector<Cell>> rows(temps.size());
    std::vector<std::vector<std::string>> warn(temps.size());
    parallel_for(temps.size(), s.threads, [&](std::size_t k) {
        char label[64];
        std::snprintf(label, sizeof label, "T = %g K", temps[k]);
        const auto model = s.model.at_temperature(temps[k]);
        const auto r = observe(one, s, model, std::string(label) + " realization", warn[k]);
        const auto e = observe(joint_density(ens, s.process, model, s.grid),
                               std::string(label) + " ensemble", warn[k]);
        const auto cc = observe(ch, s, model, std::string(label) + " chirped", warn[k]);
        rows[k] = {temps[k], r.width, e.width, cc.width, r.rate, e.rate, cc.rate};
    });
    Table t = pos_table({"T"}, {"width_realization", "width_ensemble", "width_chirped",
                                "rate_realization", "rate_ensemble", "rate_chirped"});
    ScenarioResult out;
    for (std::size_t k = 0; k < temps.size(); ++k) {
        t.add_row(rows[k]);
        out.warnings.insert(out.warnings.end(), warn[k].begin(), warn[k].end());
    }
    // relative spread max/min - 1 of each width curve
    json spread = json::object();
    for (const char* name : {"width_realization", "width_ensemble", "width_chirped"}) {
        const auto v = column(t, name);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double x : v)
            if (std::isfinite(x)) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        spread[name] = num_or_null(hi / lo - 1.0);
    }
    out.tables.emplace_back("temperature", std::move(t));
    out.summary = {{"design_temperature", s.design_temperature}, {"relative_spread", spread}};
    return out;
}

// ---------------------------------------------------------------------------

struct PerturbedPoint {
    double width_mean = nan, width_se = 0.0, rate_mean = nan, rate_se = 0.0;
    std::size_t failures = 0;
};

/// Ensemble over gen, or the base structure itself when identity is set.
PerturbedPoint perturbed_point(const PolingStructure& base, bool identity,
                               const StructureGenerator& gen, const Setup& s,
                               const RunConfig& c, const RandomSource& src,
                               const std::string& what, std::vector<std::string>& warnings)
{
    PerturbedPoint pt;
    if (identity) {
        const auto v = observe(base, s, s.model, what, warnings);
        pt.width_mean = v.width;
        pt.rate_mean = v.rate;
        return pt;
    }
    EnsembleOptions opt;
    opt.realizations = c.count("realizations");
    opt.threads = s.threads;
    opt.max_failure_fraction = c.number("max_failure_fraction");
    const auto st = ensemble_run(gen, s.process, s.model, s.grid,
                                 {rate_observable(), width_observable()}, src, opt);
    pt.rate_mean = st[0].mean;
    pt.rate_se = standard_error(st[0]);
    pt.width_mean = st[1].mean;
    pt.width_se = standard_error(st[1]);
    pt.failures = st[1].failures;
    if (pt.failures)
        warnings.push_back(what + ": " + std::to_string(pt.failures) +
                           " realizations without a half-maximum crossing");
    return pt;
}

ScenarioResult run_fab_error_scan(const RunConfig& c, const Setup& s, const Progress& p)
{
    const auto errs = c.numbers("sigma_er_list");
    const auto model = fabrication_model_from_name(c.text("fab_model"));
    const std::vector<std::pair<std::string, PolingStructure>> bases = {
        {"chirped", chirped_structure(s, c.number("zeta"))},
        {"realization", one_realization(s, Family::rps, c.number("sigma"))}};
    ScenarioResult out;
    Table t = pos_table({"sigma_er"}, {});
    for (const auto& b : bases)
        for (const char* q : {"width_mean", "width_se", "rate_mean", "rate_se", "width_change"})
            t.columns.push_back({b.first + "_" + q, ColumnKind::derived});
    std::vector<std::vector<PerturbedPoint>> pts(bases.size());
    for (std::size_t k = 0; k < errs.size(); ++k) {
        say(p, "fabrication error " + io::format_number(errs[k], 6) + " m");
        for (std::size_t b = 0; b < bases.size(); ++b) {
            const auto& base = bases[b].second;
            const double se = errs[k];
            StructureGenerator gen = [&base, se, model](Rng& r) {
                return apply_fabrication_error(base, se, r, model);
            };
            pts[b].push_back(perturbed_point(base, se == 0.0, gen, s, c,
                                             substream(substream(s.root, k), b),
                                             bases[b].first + " at sigma_er " +
                                                 io::format_number(se, 6),
                                             out.warnings));
        }
    }
    std::vector<WidthRateValue> baseline;
    for (const auto& b : bases)
        baseline.push_back(observe(b.second, s, s.model, b.first + " baseline", out.warnings));
    json change = json::object();
    for (std::size_t k = 0; k < errs.size(); ++k) {
        std::vector<Cell> row{errs[k]};
        for (std::size_t b = 0; b < bases.size(); ++b) {
            const auto& pt = pts[b][k];
            row.insert(row.end(), {pt.width_mean, pt.width_se, pt.rate_mean, pt.rate_se,
                                   pt.width_mean / baseline[b].width - 1.0});
        }
        t.add_row(std::move(row));
    }
    json corr = json::object();
    for (std::size_t b = 0; b < bases.size(); ++b) {
        std::vector<double> wv, rv;
        for (const auto& pt : pts[b]) {
            wv.push_back(pt.width_mean);
            rv.push_back(pt.rate_mean);
        }
        change[bases[b].first] = num_or_null(pts[b].back().width_mean / baseline[b].width - 1.0);
        corr[bases[b].first] = errs.size() >= 2 ? num_or_null(spearman(wv, rv)) : json(nullptr);
    }
    out.tables.emplace_back("fab_error", std::move(t));
    out.summary = {{"model", c.text("fab_model")},
                   {"largest_sigma_er", errs.back()},
                   {"width_change_at_largest", change},
                   {"width_rate_rank_correlation", corr}};
    return out;
}

// ---------------------------------------------------------------------------

ScenarioResult run_segment_scan(const RunConfig& c, const Setup& s, const Progress& p)
{
    const auto ds = c.integers("d_list");
    const auto base = chirped_structure(s, c.number("zeta"));
    ScenarioResult out;
    Table t({{"d", ColumnKind::integer},
             {"width_mean", ColumnKind::derived},
             {"width_se", ColumnKind::derived},
             {"rate_mean", ColumnKind::derived},
             {"rate_se", ColumnKind::derived}});
    for (auto d : ds)
        if (static_cast<std::size_t>(d) > s.N_L)
            throw ParameterError("segment length d = " + std::to_string(d) +
                                 " exceeds N_L = " + std::to_string(s.N_L));
    std::vector<double> dv, wv, rv;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const auto d = static_cast<std::size_t>(ds[k]);
        say(p, "segments of " + std::to_string(d) + " domains");
        StructureGenerator gen = [&base, d](Rng& r) { return shuffle_segments(base, d, r); };
        const auto pt = perturbed_point(base, d == s.N_L, gen, s, c, substream(s.root, k),
                                        "d = " + std::to_string(d), out.warnings);
        t.add_row({ds[k], pt.width_mean, pt.width_se, pt.rate_mean, pt.rate_se});
        dv.push_back(static_cast<double>(d));
        wv.push_back(pt.width_mean);
        rv.push_back(pt.rate_mean);
    }
    out.tables.emplace_back("segments", std::move(t));
    out.summary = {{"width_d_rank_correlation", ds.size() >= 2 ? num_or_null(spearman(dv, wv)) : json(nullptr)},
                   {"rate_d_rank_correlation", ds.size() >= 2 ? num_or_null(spearman(dv, rv)) : json(nullptr)}};
    return out;
}

} // namespace

ScenarioResult run_scenario(const RunConfig& cfg, const Progress& progress)
{
    using Runner = ScenarioResult (*)(const RunConfig&, const Setup&, const Progress&);
    static const std::vector<std::pair<std::string, Runner>> runners = {
        {"rate-vs-NL", run_rate_vs_nl},
        {"width-vs-NL", run_width_vs_nl},
        {"sigma-zeta-match", run_sigma_zeta_match},
        {"histogram-study", run_histogram_study},
        {"hom-study", run_hom_study},
        {"sumfreq-study", run_sumfreq_study},
        {"spatial-study", run_spatial_study},
        {"temperature-scan", run_temperature_scan},
        {"fab-error-scan", run_fab_error_scan},
        {"segment-scan", run_segment_scan}};
    scenario_info(cfg.scenario);
    for (const auto& [id, run] : runners)
        if (id == cfg.scenario) {
            const auto setup = make_setup(cfg);
            auto r = run(cfg, setup, progress);
            json s = {{"scenario", cfg.scenario},
                      {"seed", cfg.seed},
                      {"l0", setup.l0},
                      {"dk0", setup.dk0()}};
            s.update(r.summary);
            r.summary = std::move(s);
            return r;
        }
    throw ConfigError("scenario '" + cfg.scenario + "' has no runner");
}

void write_outputs(const ScenarioResult& r, const RunConfig& cfg, const fs::path& dir)
{
    io::OutputBundle bundle(dir);
    json files = json::array();
    for (const auto& [name, t] : r.tables) {
        bundle.write_csv(name + ".csv", t);
        files.push_back(name + ".csv");
    }
    bundle.write_json("summary.json", r.summary);
    files.push_back("summary.json");
    files.push_back("metadata.json");
    const json meta = {{"config", resolved_json(cfg)},
                       {"version", version()},
                       {"files", files},
                       {"warnings", r.warnings}};
    bundle.write_json("metadata.json", meta);
    bundle.commit();
}

} // namespace spdc

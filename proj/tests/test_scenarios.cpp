#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <map>
#include <string>

#include "spdc/config.hpp"
#include "spdc/errors.hpp"
#include "spdc/io.hpp"
#include "spdc/scenarios.hpp"
#include "spdc/spectra.hpp"

using namespace spdc;
namespace fs = std::filesystem;

namespace {

using Overrides = std::map<std::string, std::string>;

/// Small settings per scenario so that every one runs in about a second.
Overrides small(const std::string& id)
{
    if (id == "rate-vs-NL" || id == "width-vs-NL")
        return {{"N_L_list", "100,300,700"}, {"sigma_list", "0,1e-6,2e-6"}, {"grid_points", "512"}};
    if (id == "sigma-zeta-match")
        return {{"zeta_list", "1e6,2.5e6"}, {"grid_points", "512"}};
    if (id == "histogram-study")
        return {{"realizations", "40"}, {"fluct_realizations", "20"},
                {"fluct_sigma_list", "1e-6,2e-6"}, {"grid_points", "256"}, {"N_L", "300"}};
    if (id == "hom-study")
        return {{"realizations", "8"}, {"zeta_list", "2.5e6"}, {"grid_points", "256"},
                {"tau_points", "201"}, {"N_L", "300"}};
    if (id == "sumfreq-study")
        return {{"realizations", "8"}, {"grid_points", "256"}, {"sumfreq_points", "257"},
                {"N_L", "300"}};
    if (id == "spatial-study")
        return {{"signal_points", "33"}, {"theta_s_points", "6"}, {"idler_points", "9"},
                {"area_theta_points", "6"}, {"area_phi_points", "4"}, {"profile_points", "21"},
                {"pump_width_list", "1e-5,1e-4"}, {"pump_band_points", "2"}};
    if (id == "temperature-scan")
        return {{"T_list", "290,297"}, {"grid_points", "512"}};
    if (id == "fab-error-scan")
        return {{"realizations", "10"}, {"sigma_er_list", "0,5e-7"}, {"grid_points", "256"},
                {"N_L", "200"}};
    if (id == "segment-scan")
        return {{"realizations", "10"}, {"d_list", "1,10,200"}, {"grid_points", "256"},
                {"N_L", "200"}};
    return {};
}

RunConfig config(const std::string& id, Overrides extra = {})
{
    auto ov = small(id);
    for (const auto& [k, v] : extra)
        ov[k] = v;
    return parse_config_text("", "", ov, id);
}

std::string fingerprint(const ScenarioResult& r)
{
    std::string s;
    for (const auto& [name, t] : r.tables)
        s += name + "\n" + io::to_csv(t);
    return s + io::dump_json(r.summary);
}

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("spdc_test_scenarios_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("fits and rank correlation")
{
    const auto f = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    // y = x^1.5 on 100..700 has R^2 0.9867
    std::vector<double> x, y;
    for (int n = 100; n <= 700; n += 100) {
        x.push_back(n);
        y.push_back(std::pow(n, 1.5));
    }
    CHECK(linear_fit(x, y).r2 == doctest::Approx(0.98674).epsilon(1e-4));
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // ties take the average rank
    CHECK(spearman({1, 2, 3}, {1, 1, 2}) == doctest::Approx(0.8660254));
    CHECK(std::isnan(spearman({1, 2, 3}, {5, 5, 5})));
    CHECK_THROWS_AS(linear_fit({1}, {2}), ParameterError);
}

TEST_CASE("every scenario is independent of the thread count")
{
    for (const auto& info : scenario_catalog()) {
        INFO(info.id);
        auto a = config(info.id, {{"threads", "1"}});
        auto b = config(info.id, {{"threads", "3"}});
        const auto ra = run_scenario(a);
        const auto rb = run_scenario(b);
        CHECK(fingerprint(ra) == fingerprint(rb));
        CHECK(ra.warnings == rb.warnings);
        CHECK_FALSE(ra.tables.empty());
        CHECK(ra.summary["scenario"] == info.id);
        // a different seed changes the Monte Carlo scenarios
        if (info.id == "histogram-study") {
            auto c = config(info.id, {{"seed", "7"}});
            CHECK(fingerprint(run_scenario(c)) != fingerprint(ra));
        }
    }
}

TEST_CASE("rate scales linearly once the structure is random")
{
    const auto r = run_scenario(config("rate-vs-NL"));
    const auto& fit = r.table("fit");
    const auto sig = column(fit, "sigma"), r2 = column(fit, "r2"), ex = column(fit, "loglog_exponent");
    REQUIRE(sig.size() == 3);
    // ordered limit: N ~ N_L^1.5
    CHECK(ex[0] == doctest::Approx(1.5).epsilon(0.02));
    CHECK(r2[2] > 0.999);
    CHECK(ex[2] == doctest::Approx(1.0).epsilon(0.03));
    CHECK(r.summary["width_nondecreasing_in_sigma"] == true);
    CHECK(r.table("rate").size() == 9);
}

TEST_CASE("fixed temperature reduces to the standard width computation")
{
    const auto c = config("temperature-scan", {{"T_list", "297"}});
    const auto r = run_scenario(c);
    const auto& t = r.table("temperature");
    REQUIRE(t.size() == 1);
    DispersionModel model(297.0);
    ProcessConfig pc;
    const double l0 = qpm_period(model, pc.omega_s0(), pc.omega_s0());
    const auto grid = SpectralGrid::centered(pc.omega_s0(), 0.5, 512);
    const auto ens = analytic_width_rate(AnalyticFamily{Family::rps, 700, l0, 2.1e-6, 0.0}, pc,
                                         model, grid);
    CHECK(column(t, "width_ensemble")[0] == ens.width);
    CHECK(column(t, "rate_ensemble")[0] == ens.rate);
    const auto ch = analytic_width_rate(AnalyticFamily{Family::chirped, 700, l0, 0.0, 2.5e6}, pc,
                                        model, grid);
    // explicit chirped structure vs its closed form
    CHECK(column(t, "width_chirped")[0] == doctest::Approx(ch.width).epsilon(0.02));
}

TEST_CASE("zero fabrication error and a single segment give the baseline exactly")
{
    const auto fab = run_scenario(config("fab-error-scan"));
    const auto& t = fab.table("fab_error");
    CHECK(column(t, "chirped_width_change")[0] == 0.0);
    CHECK(column(t, "chirped_width_se")[0] == 0.0);
    CHECK(column(t, "realization_width_change")[0] == 0.0);
    CHECK(column(t, "chirped_width_change")[1] != 0.0);
    const auto seg = run_scenario(config("segment-scan"));
    const auto& s = seg.table("segments");
    CHECK(column(s, "d").back() == 200.0);
    CHECK(column(s, "width_mean").back() == column(t, "chirped_width_mean")[0]);
    CHECK(column(s, "rate_mean").back() == column(t, "chirped_rate_mean")[0]);
    CHECK(column(s, "width_se").back() == 0.0);
    // shorter segments: narrower, brighter
    CHECK(column(s, "width_mean")[0] < column(s, "width_mean").back());
    CHECK(column(s, "rate_mean")[0] > column(s, "rate_mean").back());
}

TEST_CASE("non-monotone chirp is a parameter error naming the boundary")
{
    try {
        run_scenario(config("segment-scan", {{"zeta", "5e8"}}));
        FAIL("expected an error");
    } catch (const ParameterError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("first violating boundary index n=") != std::string::npos);
        CHECK(exit_code_for(e) == 2);
    }
    CHECK_THROWS_AS(run_scenario(config("segment-scan", {{"d_list", "1,500"}})), ParameterError);
}

TEST_CASE("output bundle is self-describing and reproducible")
{
    const auto dir = scratch("bundle");
    const auto c = config("hom-study");
    const auto r = run_scenario(c);
    write_outputs(r, c, dir);
    for (const char* f : {"hom.csv", "dip_widths.csv", "entanglement_vs_zeta.csv", "summary.json",
                          "metadata.json"})
        CHECK(fs::exists(dir / f));
    const auto meta_text = io::read_file(dir / "metadata.json");
    const auto meta = json::parse(meta_text);
    CHECK(meta["config"] == resolved_json(c));
    CHECK(meta["files"].size() == 5);
    const auto back = parse_config(dir / "metadata.json", {}, "");
    CHECK(equivalent(back, c));
    const auto hom = io::read_file(dir / "hom.csv");
    CHECK(hom.rfind("tau,R_ensemble,R_chirped,R_realization\n", 0) == 0);
    // rerun from the metadata into the same place: identical bytes
    write_outputs(run_scenario(back), back, dir);
    CHECK(io::read_file(dir / "hom.csv") == hom);
    CHECK(io::read_file(dir / "metadata.json") == meta_text);
    fs::remove_all(dir);
}

TEST_CASE("scenario summaries")
{
    const auto h = run_scenario(config("hom-study"));
    CHECK(h.summary["R_at_zero"]["ensemble"].get<double>() <= 1e-6);
    CHECK(h.summary["entanglement_time"]["chirped"].get<double>() > 0.0);
    const auto m = run_scenario(config("sigma-zeta-match"));
    const auto& t = m.table("match");
    CHECK(t.size() == 4);
    CHECK(column(t, "matched") == std::vector<double>{1, 1, 1, 1});
    const auto sp = run_scenario(config("spatial-study", {{"include_realization", "false"}}));
    CHECK(sp.summary["correlated_fwhm"].size() == 2);
    CHECK_THROWS(sp.table("map_realization"));
    CHECK(sp.table("map_ensemble").size() == 6 * 33);
    CHECK(sp.table("width_scan").size() == 2);
}

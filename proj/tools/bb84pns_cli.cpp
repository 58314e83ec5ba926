#include "CLI11.hpp"
#include "json.hpp"

#include "bb84pns/approx.hpp"
#include "bb84pns/attack.hpp"
#include "bb84pns/errors.hpp"
#include "bb84pns/model.hpp"
#include "bb84pns/montecarlo.hpp"
#include "bb84pns/optimize.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;
using namespace bb84pns;

struct RunConfig {
    std::string command;
    double alpha = 0.25; // dB/km
    double eta = 0.1;
    double p_d = 1e-5;
    double g2 = 1.0;
    double v = 1.0;
    double d = 30.0; // km
    double d_min = 10.0, d_max = 100.0, step = 5.0;
    double v_min = 0.7, v_max = 1.0, v_step = 0.01;
    double mu = 0.1;
    std::string cloner = "C";
    std::string format = "csv";
    std::string output; // empty = stdout
    std::uint64_t seed = 12345;
    long long n_pulses = 1000000;
};

ClonerKind parse_cloner(const std::string& s) {
    if (s == "None" || s == "none") return ClonerKind::None;
    if (s == "A" || s == "a") return ClonerKind::ClonerA;
    if (s == "C" || s == "c") return ClonerKind::ClonerC;
    throw std::invalid_argument("cloner: expected None, A or C, got '" + s + "'");
}

// %.17g round-trips doubles exactly and ignores any locale the host set up.
std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ordered_json echo_config(const RunConfig& c) {
    ordered_json j;
    j["command"] = c.command;
    j["alpha"] = c.alpha;
    j["eta"] = c.eta;
    j["p_d"] = c.p_d;
    j["g2"] = c.g2;
    j["v"] = c.v;
    j["d"] = c.d;
    j["d_min"] = c.d_min;
    j["d_max"] = c.d_max;
    j["step"] = c.step;
    j["v_min"] = c.v_min;
    j["v_max"] = c.v_max;
    j["v_step"] = c.v_step;
    j["mu"] = c.mu;
    j["cloner"] = c.cloner;
    j["format"] = c.format;
    j["output"] = c.output;
    j["seed"] = c.seed;
    j["n_pulses"] = c.n_pulses;
    return j;
}

ordered_json point_row(const SecurityPoint& pt) {
    ordered_json row;
    row["d_km"] = pt.d;
    row["mu_star"] = pt.mu;
    row["S"] = pt.s;
    row["I_AB"] = pt.i_ab;
    row["I_AE"] = pt.i_ae;
    row["Q"] = pt.q;
    row["p_c1"] = pt.attack.p_c1;
    row["p_b1"] = pt.attack.p_b1;
    row["D1"] = pt.attack.d1;
    row["p_s2"] = pt.attack.p_s2;
    row["p_c2"] = pt.attack.p_c2;
    row["D2"] = pt.attack.d2;
    return row;
}

std::string csv_cell(const ordered_json& val) {
    if (val.is_string()) return val.get<std::string>();
    if (val.is_boolean()) return val.get<bool>() ? "1" : "0";
    if (val.is_number_unsigned()) return std::to_string(val.get<unsigned long long>());
    if (val.is_number_integer()) return std::to_string(val.get<long long>());
    return fmt(val.get<double>());
}

std::string to_csv(const std::vector<ordered_json>& rows) {
    std::string out;
    if (rows.empty()) return out;
    bool first = true;
    for (const auto& [key, val] : rows.front().items()) {
        (void)val;
        if (!first) out += ',';
        out += key;
        first = false;
    }
    out += '\n';
    for (const auto& row : rows) {
        first = true;
        for (const auto& [key, val] : row.items()) {
            (void)key;
            if (!first) out += ',';
            out += csv_cell(val);
            first = false;
        }
        out += '\n';
    }
    return out;
}

void write_artifact(const RunConfig& cfg, const std::vector<ordered_json>& rows) {
    std::string payload;
    if (cfg.format == "json") {
        ordered_json doc;
        doc["config"] = echo_config(cfg);
        doc["results"] = rows;
        payload = doc.dump(2) + "\n";
    } else {
        payload = to_csv(rows);
    }
    if (cfg.output.empty()) {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        return;
    }
    namespace fs = std::filesystem;
    fs::path target(cfg.output);
    if (target.is_relative())
        if (const char* dir = std::getenv("BB84PNS_OUTPUT_DIR"); dir && *dir)
            target = fs::path(dir) / target;
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::invalid_argument("output: cannot write '" + tmp.string() + "'");
        f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        f.flush();
        if (!f.good())
            throw std::invalid_argument("output: short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec); // atomic swap into place
    if (ec) {
        fs::remove(tmp, ec);
        throw std::invalid_argument("output: cannot move result into '" + target.string() +
                                    "'");
    }
}

std::vector<ordered_json> run_scan_distance(const RunConfig& c) {
    const DetectorParams det(c.eta, c.p_d);
    const ScanResult r =
        scan_distance(c.d_min, c.d_max, c.step, c.alpha, det, c.v, parse_cloner(c.cloner));
    std::vector<ordered_json> rows;
    rows.reserve(r.points.size());
    for (const auto& pt : r.points) rows.push_back(point_row(pt));
    return rows;
}

std::vector<ordered_json> run_scan_visibility(const RunConfig& c) {
    const DetectorParams det(c.eta, c.p_d);
    const ClonerKind cloner = parse_cloner(c.cloner);
    const ScanResult r =
        scan_visibility(c.d, c.v_min, c.v_max, c.v_step, c.alpha, det, cloner);
    std::vector<ordered_json> rows;
    rows.reserve(r.points.size());
    for (const auto& pt : r.points) {
        ordered_json row;
        row["v"] = pt.v;
        row.update(point_row(pt));
        // Eve's information budget split by pulse class, relative to I(A:B)
        const SourceModel src = SourceModel::poissonian(pt.mu);
        const EveRates er = eve_rates(src, det, pt.attack);
        row["R1I1_norm"] = er.r1 * i1(pt.attack.d1) / pt.i_ab;
        row["R2s_norm"] = er.r2s / pt.i_ab;
        row["R2cI2_norm"] = er.r2c * i2(cloner, pt.attack.d2) / pt.i_ab;
        row["R3_norm"] = er.r3 / pt.i_ab;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ordered_json> run_optimal_mu(const RunConfig& c) {
    const DetectorParams det(c.eta, c.p_d);
    const OptimalMu om = optimize_mu(c.d, c.alpha, det, c.v, parse_cloner(c.cloner));
    ordered_json row = point_row(om.point);
    row["insecure"] = om.insecure;
    return {row};
}

std::vector<ordered_json> run_limit_distance(const RunConfig& c) {
    const TransmissionLimit tl = t_limit(c.eta, c.p_d, c.g2, c.alpha);
    if (tl.unbounded)
        throw ApproxInfeasibleError("limit-distance: p_d = 0 imposes no dark-count "
                                    "ceiling; the limiting distance is unbounded");
    ordered_json row;
    row["t_lim"] = tl.t_lim;
    row["d_lim_km"] = tl.d_lim;
    return {row};
}

std::vector<ordered_json> run_compare_cloners(const RunConfig& c) {
    const DetectorParams det(c.eta, c.p_d);
    const OptimalMu om = optimize_mu(c.d, c.alpha, det, c.v, ClonerKind::ClonerC);
    const SourceModel src = SourceModel::poissonian(om.mu_star);
    const ChannelParams ch(c.alpha, c.d, c.v);
    std::vector<ordered_json> rows;
    const std::pair<ClonerKind, const char*> kinds[] = {
        {ClonerKind::None, "None"}, {ClonerKind::ClonerA, "A"}, {ClonerKind::ClonerC, "C"}};
    for (const auto& [kind, name] : kinds) {
        const SecurityPoint pt =
            kind == ClonerKind::ClonerC
                ? om.point
                : make_security_point(src, ch, det, optimize_attack(src, ch, det, kind));
        ordered_json row;
        row["cloner"] = name;
        row.update(point_row(pt));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ordered_json> run_simulate(const RunConfig& c) {
    const SourceModel src = SourceModel::poissonian(c.mu);
    const ChannelParams ch(c.alpha, c.d, c.v);
    const DetectorParams det(c.eta, c.p_d);
    const SimResult sr = simulate_link(SimConfig{c.n_pulses, c.seed, src, ch, det});
    const LinkRates lr = link_rates(src, ch, det);
    ordered_json row;
    row["n_pulses"] = sr.n_pulses;
    row["seed"] = c.seed;
    row["c_right_hat"] = sr.c_right_hat;
    row["c_right_se"] = sr.c_right_se;
    row["c_wrong_hat"] = sr.c_wrong_hat;
    row["c_wrong_se"] = sr.c_wrong_se;
    row["q_hat"] = sr.q_hat;
    row["q_se"] = sr.q_se;
    row["arrived_hat"] = sr.arrived_hat;
    row["arrived_se"] = sr.arrived_se;
    row["c_right"] = lr.c_right;
    row["c_wrong"] = lr.c_wrong;
    row["q"] = lr.q;
    row["p_arrived"] = 1.0 - p_empty(src, ch.t(), det.eta);
    return {row};
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Security of practical BB84 against photon-number-splitting and "
                 "2->3 cloning attacks"};
    app.set_version_flag("--version", "bb84pns 1.0.0");
    app.set_config("--config", "", "flat 'key = value' file, '#' starts a comment");
    app.require_subcommand(1);

    app.add_option("--alpha", cfg.alpha, "fiber attenuation [dB/km]")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--eta", cfg.eta, "detector efficiency")->capture_default_str();
    app.add_option("--p-d", cfg.p_d, "dark count probability per gate")
        ->capture_default_str();
    app.add_option("--g2", cfg.g2, "second-order coherence of the source "
                                   "(limit-distance only; sweeps use a Poissonian "
                                   "source, g2 = 1)")
        ->capture_default_str();
    app.add_option("--v", cfg.v, "interference visibility")->capture_default_str();
    app.add_option("--d", cfg.d, "fiber length [km]")->capture_default_str();
    app.add_option("--d-min", cfg.d_min, "sweep start [km]")->capture_default_str();
    app.add_option("--d-max", cfg.d_max, "sweep end [km]")->capture_default_str();
    app.add_option("--step", cfg.step, "distance sweep step [km]")->capture_default_str();
    app.add_option("--v-min", cfg.v_min, "visibility sweep start")->capture_default_str();
    app.add_option("--v-max", cfg.v_max, "visibility sweep end")->capture_default_str();
    app.add_option("--v-step", cfg.v_step, "visibility sweep step")->capture_default_str();
    app.add_option("--mu", cfg.mu, "mean photon number (simulate)")->capture_default_str();
    app.add_option("--cloner", cfg.cloner, "Eve's two-photon machine")
        ->capture_default_str()
        ->check(CLI::IsMember({"None", "none", "A", "a", "C", "c"}));
    app.add_option("--format", cfg.format, "output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", cfg.output,
                   "output file (default stdout); relative paths resolve under "
                   "$BB84PNS_OUTPUT_DIR when set");
    app.add_option("--seed", cfg.seed, "simulation seed")->capture_default_str();
    app.add_option("--n-pulses", cfg.n_pulses, "pulses to simulate")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    app.add_subcommand("scan-distance", "secret key rate versus fiber length")
        ->fallthrough();
    app.add_subcommand("scan-visibility",
                       "optimal attack and rate versus visibility at fixed length")
        ->fallthrough();
    app.add_subcommand("optimal-mu", "optimize the mean photon number at one point")
        ->fallthrough();
    app.add_subcommand("limit-distance",
                       "dark-count limit on transmission and fiber length")
        ->fallthrough();
    app.add_subcommand("compare-cloners",
                       "S for Eve without a cloner, cloner A and cloner C at equal mu")
        ->fallthrough();
    app.add_subcommand("simulate", "Monte Carlo of the honest link versus closed forms")
        ->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // help/version keep 0, bad usage is 2
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        std::vector<ordered_json> rows;
        if (cfg.command == "scan-distance") rows = run_scan_distance(cfg);
        else if (cfg.command == "scan-visibility") rows = run_scan_visibility(cfg);
        else if (cfg.command == "optimal-mu") rows = run_optimal_mu(cfg);
        else if (cfg.command == "limit-distance") rows = run_limit_distance(cfg);
        else if (cfg.command == "compare-cloners") rows = run_compare_cloners(cfg);
        else rows = run_simulate(cfg);
        write_artifact(cfg, rows);
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NoCountsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

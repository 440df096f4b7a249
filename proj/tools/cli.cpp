// Command-line front end: partition building, ensemble design, EXIT
// analysis, degree optimization, SER sweeps, capacity curves and frame
// replay.  Every subcommand writes a manifest next to its outputs so a run
// can be reproduced from the artifacts alone.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "iralat/channel.hpp"
#include "iralat/exit.hpp"
#include "iralat/rng.hpp"
#include "iralat/graph.hpp"
#include "iralat/sim.hpp"

namespace {

constexpr const char* kVersion = "iralat 1.0.0";

// exit statuses beyond CLI11's parse errors
constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kInfeasible = 3;

struct Global {
    std::uint64_t seed = 1;
    std::string out = ".";
    int threads = 0;  // 0 -> hardware concurrency

    int workers() const {
        if (threads > 0) return threads;
        const unsigned hc = std::thread::hardware_concurrency();
        return hc ? static_cast<int>(hc) : 1;
    }
};

iralat::Hurwitz parse_xi(const std::string& text) {
    // accepts forms like "1+2i", "2-1i", "3", "-1+i"
    static const std::regex re(
        R"(^\s*([+-]?\d+)?\s*(?:([+-]?)\s*(\d*)i)?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re) || (m[1].str().empty() && m[2].str().empty()))
        throw CLI::ValidationError("--xi", "cannot parse '" + text + "'");
    const long re_part = m[1].str().empty() ? 0 : std::stol(m[1].str());
    long im_part = 0;
    if (m[2].matched || !m[3].str().empty()) {
        const long mag = m[3].str().empty() ? 1 : std::stol(m[3].str());
        im_part = (m[2].str() == "-") ? -mag : mag;
    }
    return iralat::Hurwitz::from_ints(re_part, im_part, 0, 0);
}

iralat::Ring parse_ring(const std::string& text) {
    if (text == "hurwitz") return iralat::Ring::hurwitz;
    if (text == "gaussian") return iralat::Ring::gaussian;
    throw CLI::ValidationError("--ring", "must be hurwitz or gaussian");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_manifest(const Global& g, const std::string& subcommand,
                    const nlohmann::json& inputs,
                    const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["tool"] = kVersion;
    j["subcommand"] = subcommand;
    j["seed"] = g.seed;
    j["threads"] = g.workers();
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    write_file(std::filesystem::path(g.out) / (subcommand + "_manifest.json"),
               j.dump(2) + "\n");
}

std::map<int, double> parse_degree_json(const std::string& text) {
    std::map<int, double> out;
    for (const auto& [k, v] : nlohmann::json::parse(text).items())
        out[std::stoi(k)] = v.get<double>();
    return out;
}

nlohmann::json degree_to_json(const std::map<int, double>& d) {
    nlohmann::json o = nlohmann::json::object();
    for (const auto& [k, v] : d) o[std::to_string(k)] = v;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace iralat;

    CLI::App app{"Multi-dimensional IRA lattice code toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Global g;
    app.add_option("--seed", g.seed, "Master seed; all randomness derives from it")
        ->capture_default_str();
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--threads", g.threads,
                   "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();

    // ---- partition ----
    auto* sc_partition = app.add_subcommand("partition", "Build a coset-leader table");
    std::string xi_text = "1+2i", ring_text = "hurwitz";
    sc_partition->add_option("--xi", xi_text, "Scaling element, e.g. 1+2i")
        ->capture_default_str();
    sc_partition->add_option("--ring", ring_text, "hurwitz | gaussian")
        ->capture_default_str();

    // ---- ensemble ----
    auto* sc_ensemble = app.add_subcommand("ensemble", "Instantiate a code ensemble");
    std::string rate_preset, alpha_text, beta_text;
    int n_symbols = 1000;
    sc_ensemble->add_option("--table1-rate", rate_preset,
                            "Built-in preset: 3/4, 2/3 or 1/2");
    sc_ensemble->add_option("--alpha", alpha_text,
                            "Edge degree distribution JSON, e.g. {\"2\":0.5,\"3\":0.5}");
    sc_ensemble->add_option("--beta", beta_text, "Check edge distribution JSON");
    sc_ensemble->add_option("--n", n_symbols, "Codeword length in symbols")
        ->capture_default_str();

    // ---- exit ----
    auto* sc_exit = app.add_subcommand("exit", "VND/CND transfer curves at one SNR");
    double snr_db = 0.0;
    int grid_size = 101, cnd_trials = 4000;
    sc_exit->add_option("--table1-rate", rate_preset, "Preset: 3/4, 2/3 or 1/2");
    sc_exit->add_option("--alpha", alpha_text, "Edge degree distribution JSON");
    sc_exit->add_option("--beta", beta_text, "Check edge distribution JSON");
    sc_exit->add_option("--snr", snr_db, "SNR in dB")->required();
    sc_exit->add_option("--grid", grid_size, "A-priori grid points")
        ->capture_default_str();
    sc_exit->add_option("--trials", cnd_trials, "CND Monte-Carlo trials per point")
        ->capture_default_str();

    // ---- optimize ----
    auto* sc_optimize = app.add_subcommand("optimize",
                                           "LP fit of the repeat distribution");
    double rate_target = 0.5;
    sc_optimize->add_option("--snr", snr_db, "Design SNR in dB")->required();
    sc_optimize->add_option("--rate", rate_target, "Target K/N")->required();
    sc_optimize->add_option("--beta", beta_text,
                            "Initial check edge distribution JSON");
    sc_optimize->add_option("--table1-rate", rate_preset,
                            "Start from a preset's check distribution");
    sc_optimize->add_option("--grid", grid_size, "A-priori grid points")
        ->capture_default_str();
    sc_optimize->add_option("--trials", cnd_trials, "CND trials per point")
        ->capture_default_str();

    // ---- threshold ----
    auto* sc_threshold = app.add_subcommand("threshold",
                                            "Decoding threshold of a distribution pair");
    sc_threshold->add_option("--table1-rate", rate_preset, "Preset: 3/4, 2/3 or 1/2");
    sc_threshold->add_option("--alpha", alpha_text, "Edge degree distribution JSON");
    sc_threshold->add_option("--beta", beta_text, "Check edge distribution JSON");
    sc_threshold->add_option("--grid", grid_size, "A-priori grid points")
        ->capture_default_str();
    sc_threshold->add_option("--trials", cnd_trials, "CND trials per point")
        ->capture_default_str();

    // ---- simulate ----
    auto* sc_simulate = app.add_subcommand("simulate", "Monte-Carlo SER/FER sweep");
    double snr_start = 0.0, snr_stop = 0.0, snr_step = 0.1;
    int max_iters = 200;
    long min_errors = 100, max_frames = 100000;
    bool noiseless = false, fixed_graph = false;
    std::string store_frame_path;
    long store_frame_index = 0;
    sc_simulate->add_option("--table1-rate", rate_preset, "Preset: 3/4, 2/3 or 1/2");
    sc_simulate->add_option("--alpha", alpha_text, "Edge degree distribution JSON");
    sc_simulate->add_option("--beta", beta_text, "Check edge distribution JSON");
    sc_simulate->add_option("--n", n_symbols, "Codeword length in symbols")
        ->capture_default_str();
    sc_simulate->add_option("--snr-start", snr_start, "First SNR point (dB)")
        ->required();
    sc_simulate->add_option("--snr-stop", snr_stop, "Last SNR point (dB)")
        ->required();
    sc_simulate->add_option("--snr-step", snr_step, "SNR step (dB)")
        ->capture_default_str();
    sc_simulate->add_option("--max-iters", max_iters, "Decoder iteration budget")
        ->capture_default_str();
    sc_simulate->add_option("--min-errors", min_errors,
                            "Symbol-error events to stop a point")
        ->capture_default_str();
    sc_simulate->add_option("--max-frames", max_frames, "Frame cap per point")
        ->capture_default_str();
    sc_simulate->add_flag("--noiseless", noiseless, "Disable channel noise");
    sc_simulate->add_flag("--fixed-graph", fixed_graph,
                          "One graph instance per point (debug mode)");
    sc_simulate->add_option("--store-frame", store_frame_path,
                            "Also store one frame of the first SNR point for replay");
    sc_simulate->add_option("--store-index", store_frame_index,
                            "Frame index to store")
        ->capture_default_str();

    // ---- capacity ----
    auto* sc_capacity = app.add_subcommand("capacity",
                                           "Constellation MI curves vs SNR");
    std::uint64_t mi_samples = 200000;
    sc_capacity->add_option("--snr-start", snr_start, "First SNR point (dB)")
        ->required();
    sc_capacity->add_option("--snr-stop", snr_stop, "Last SNR point (dB)")
        ->required();
    sc_capacity->add_option("--snr-step", snr_step, "SNR step (dB)")
        ->capture_default_str();
    sc_capacity->add_option("--samples", mi_samples, "MC samples per point")
        ->capture_default_str();

    // ---- replay ----
    auto* sc_replay = app.add_subcommand("replay", "Re-decode a stored frame");
    std::string frame_path;
    int replay_iters = 0;
    sc_replay->add_option("--in", frame_path, "Stored frame JSON")->required();
    sc_replay->add_option("--max-iters", replay_iters,
                          "Override the stored iteration budget (0 = keep)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    auto degree_pair = [&]() -> std::pair<std::map<int, double>, std::map<int, double>> {
        if (!rate_preset.empty()) {
            const Preset& p = preset_by_rate(rate_preset);
            return {p.edge_vn, p.edge_cn};
        }
        if (alpha_text.empty() || beta_text.empty())
            throw std::runtime_error(
                "need either --table1-rate or both --alpha and --beta");
        return {parse_degree_json(alpha_text), parse_degree_json(beta_text)};
    };

    try {
        std::filesystem::create_directories(g.out);
        const auto out_dir = std::filesystem::path(g.out);

        if (*sc_partition) {
            const PartitionTable table = build_partition(parse_xi(xi_text),
                                                         parse_ring(ring_text));
            const std::string file = "partition.json";
            write_file(out_dir / file, table.to_json());
            write_manifest(g, "partition",
                           {{"xi", xi_text}, {"ring", ring_text}}, {file});
            std::cout << "partition: " << table.size() << " coset leaders, p = "
                      << table.p << ", exponent " << table.m_exp << "\n";
            return kOk;
        }

        if (*sc_ensemble) {
            const auto [alpha, beta] = degree_pair();
            const PartitionTable table =
                build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
            const CodeEnsemble ens = make_ensemble(alpha, beta, table, n_symbols);
            const std::string file = "ensemble.json";
            write_file(out_dir / file, ens.to_json());
            write_manifest(g, "ensemble",
                           {{"rate_preset", rate_preset},
                            {"alpha", degree_to_json(alpha)},
                            {"beta", degree_to_json(beta)},
                            {"n", n_symbols}},
                           {file});
            std::cout << "ensemble: K = " << ens.K << ", N = " << ens.N
                      << ", L = " << ens.L << ", design rate "
                      << ens.design_rate << " bits/complex dim\n";
            return kOk;
        }

        if (*sc_exit || *sc_optimize || *sc_threshold) {
            const PartitionTable table =
                build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
            const Constellation cons = normalize_constellation(table);
            const JTable jt = JTable::cached(table.size(), "", g.workers());
            CndConfig cnd;
            cnd.trials = cnd_trials;
            cnd.seed = derive_seed(g.seed, 0xc);
            cnd.workers = g.workers();

            if (*sc_exit) {
                const auto [alpha, beta] = degree_pair();
                const auto grid = uniform_grid(grid_size);
                const ExitCurve vnd = vnd_curve(alpha, grid, jt);
                const ExitCurve cndc =
                    cnd_curve(beta, snr_db, grid, table, cons, jt, cnd);
                write_file(out_dir / "vnd.dat", vnd.to_plot_data());
                write_file(out_dir / "cnd.dat", cndc.to_plot_data());
                write_file(out_dir / "cnd.json", cndc.to_json());
                write_manifest(g, "exit",
                               {{"rate_preset", rate_preset},
                                {"alpha", degree_to_json(alpha)},
                                {"beta", degree_to_json(beta)},
                                {"snr_db", snr_db},
                                {"grid", grid_size},
                                {"trials", cnd_trials}},
                               {"vnd.dat", "cnd.dat", "cnd.json"});
                const bool open = tunnel_open(alpha, cndc, jt, 0.0001);
                std::cout << "exit: tunnel " << (open ? "open" : "closed")
                          << " at " << snr_db << " dB\n";
                return kOk;
            }

            if (*sc_optimize) {
                std::map<int, double> beta;
                if (!beta_text.empty()) beta = parse_degree_json(beta_text);
                else if (!rate_preset.empty()) beta = preset_by_rate(rate_preset).edge_cn;
                else beta = {{1, 1.0 / 18.0}, {3, 17.0 / 18.0}};
                OptimizerConfig cfg;
                cfg.grid_size = grid_size;
                cfg.cnd = cnd;
                const OptimizeResult res = optimize_degrees(
                    beta, snr_db, rate_target, table, cons, jt, cfg);
                nlohmann::json j;
                j["feasible"] = res.feasible;
                j["margin"] = res.margin;
                j["alpha"] = degree_to_json(res.edge_vn);
                j["beta"] = degree_to_json(res.edge_cn);
                write_file(out_dir / "optimized.json", j.dump(2) + "\n");
                write_manifest(g, "optimize",
                               {{"snr_db", snr_db},
                                {"rate", rate_target},
                                {"beta0", degree_to_json(beta)},
                                {"grid", grid_size},
                                {"trials", cnd_trials}},
                               {"optimized.json"});
                std::cout << "optimize: " << (res.feasible ? "feasible" : "infeasible")
                          << ", margin " << res.margin << "\n"
                          << j["alpha"].dump() << "\n";
                return res.feasible ? kOk : kInfeasible;
            }

            // threshold
            const auto [alpha, beta] = degree_pair();
            ThresholdConfig cfg;
            cfg.opt.grid_size = grid_size;
            cfg.opt.cnd = cnd;
            cfg.de.seed = derive_seed(g.seed, 0xd);
            cfg.de.workers = g.workers();
            const double thr =
                threshold_search(alpha, beta, table, cons, jt, cfg);
            nlohmann::json j;
            j["threshold_db"] = thr;
            j["alpha"] = degree_to_json(alpha);
            j["beta"] = degree_to_json(beta);
            write_file(out_dir / "threshold.json", j.dump(2) + "\n");
            write_manifest(g, "threshold",
                           {{"rate_preset", rate_preset},
                            {"alpha", degree_to_json(alpha)},
                            {"beta", degree_to_json(beta)},
                            {"grid", grid_size},
                            {"trials", cnd_trials}},
                           {"threshold.json"});
            std::cout << "threshold: " << thr << " dB\n";
            return kOk;
        }

        if (*sc_simulate) {
            const auto [alpha, beta] = degree_pair();
            const PartitionTable table =
                build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
            const CodeEnsemble ens = make_ensemble(alpha, beta, table, n_symbols);
            ExperimentSpec spec;
            spec.ensemble = &ens;
            spec.snr_start_db = snr_start;
            spec.snr_stop_db = snr_stop;
            spec.snr_step_db = snr_step;
            spec.max_iterations = max_iters;
            spec.stop = {min_errors, max_frames};
            spec.seed = g.seed;
            spec.noiseless = noiseless;
            spec.fixed_graph = fixed_graph;
            spec.workers = g.workers();

            std::vector<std::string> outputs{"ser.csv", "ser.json"};
            if (!store_frame_path.empty()) {
                const StoredFrame f =
                    capture_frame(spec, snr_start, store_frame_index);
                write_file(store_frame_path, f.to_json());
                outputs.push_back(store_frame_path);
            }
            const auto rows = run_ser_sweep(spec);
            write_file(out_dir / "ser.csv", rows_to_csv(rows));
            write_file(out_dir / "ser.json", rows_to_json(rows, spec));
            write_manifest(g, "simulate",
                           {{"rate_preset", rate_preset},
                            {"alpha", degree_to_json(alpha)},
                            {"beta", degree_to_json(beta)},
                            {"n", n_symbols},
                            {"snr_start", snr_start},
                            {"snr_stop", snr_stop},
                            {"snr_step", snr_step},
                            {"max_iters", max_iters},
                            {"min_errors", min_errors},
                            {"max_frames", max_frames},
                            {"noiseless", noiseless},
                            {"fixed_graph", fixed_graph}},
                           outputs);
            for (const auto& r : rows)
                std::cout << r.snr_db << " dB: SER " << r.ser << " ("
                          << r.symbol_errors << " errors / " << r.frames
                          << " frames)" << (r.hit_frame_cap ? " [frame cap]" : "")
                          << "\n";
            return kOk;
        }

        if (*sc_capacity) {
            const PartitionTable hw =
                build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
            const PartitionTable gs =
                build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::gaussian);
            std::vector<double> grid;
            for (double s = snr_start; s <= snr_stop + 1e-9; s += snr_step)
                grid.push_back(s);
            const auto rows = run_capacity_sweep(
                normalize_constellation(hw), normalize_constellation(gs), grid,
                mi_samples, g.seed, g.workers());
            write_file(out_dir / "capacity.csv", capacity_to_csv(rows));
            write_manifest(g, "capacity",
                           {{"snr_start", snr_start},
                            {"snr_stop", snr_stop},
                            {"snr_step", snr_step},
                            {"samples", mi_samples}},
                           {"capacity.csv"});
            std::cout << "capacity: " << rows.size() << " points written\n";
            return kOk;
        }

        if (*sc_replay) {
            std::ifstream in(frame_path);
            if (!in) throw std::runtime_error("cannot read " + frame_path);
            std::stringstream ss;
            ss << in.rdbuf();
            const StoredFrame f = StoredFrame::from_json(ss.str());
            const PartitionTable table =
                build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
            const Constellation cons = normalize_constellation(table);
            const ReplayResult r = replay_frame(f, table, cons, replay_iters);
            write_manifest(g, "replay",
                           {{"in", frame_path}, {"max_iters", replay_iters}},
                           {});
            std::cout << "replay: " << (r.result.converged ? "converged" : "not converged")
                      << " after " << r.result.iterations << " iterations, "
                      << r.symbol_errors << " symbol errors\n";
            for (std::size_t it = 0; it < r.trace.violations.size(); ++it)
                std::cout << "  iter " << (it + 1) << ": "
                          << r.trace.violations[it] << " unsatisfied checks\n";
            return kOk;
        }
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return kRuntimeError;
    }
    return kOk;
}

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "floq/basis.hpp"
#include "floq/floquet.hpp"
#include "floq/grape.hpp"
#include "floq/io.hpp"
#include "floq/numerics.hpp"
#include "floq/operators.hpp"
#include "floq/targets.hpp"
#include "floq/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace floq;

namespace {

struct Config {
    // sector
    int L = 8;
    int M = 1;
    std::string stats = "hardcore";
    // target
    std::string family = "ring";
    double K = 1.0;
    int hub = 0;  // 0 = center site
    double U_target = 0.0;
    double omega = 1.0;
    bool centered = false;
    double scale = 1.0;
    std::string matrix_re, matrix_im, clauses_path;
    // drive
    std::string drive = "g";
    double gmax = 5.0;
    double jmax = 1.0;
    double J0 = 1.0;
    double U_drift = 0.0;
    std::string convention = "number";
    // steps
    int N = 10;
    double T = 10.0;
    // optimizer
    int restarts = 10;
    int max_iter = 1000;
    int threads = 0;
    std::uint64_t seed = 1234;
    std::string objective = "abs";
    // evolve
    int evolve_cycles = 100;
    int psi0 = 0;
    std::string controls_path;
    // adiabatic
    int ad_cycles = 200;
    double floor = 0.999;
    std::string schedule = "linear";
    // sweep
    std::string mode = "tn";
    std::vector<double> T_list;
    std::vector<int> N_list;
    std::vector<int> M_list;
    std::string L_range = "5..10";
    double tau = 1.0;
    double threshold = 0.999;
    double T_max = 20.0;
    int workers = 0;
    // output
    std::string outdir = ".";
    std::string prefix = "";
};

template <typename T>
void from_cfg(const json& j, const char* ptr, T& value) {
    const json::json_pointer p(ptr);
    if (j.contains(p)) value = j.at(p).get<T>();
}

void load_config_file(const std::string& path, Config& c) {
    json j;
    try {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file " + path);
        in >> j;
    } catch (const json::exception& e) {
        throw config_error("config file " + path + ": " + e.what());
    }
    from_cfg(j, "/sector/L", c.L);
    from_cfg(j, "/sector/M", c.M);
    from_cfg(j, "/sector/stats", c.stats);
    from_cfg(j, "/target/family", c.family);
    from_cfg(j, "/target/K", c.K);
    from_cfg(j, "/target/hub", c.hub);
    from_cfg(j, "/target/U", c.U_target);
    from_cfg(j, "/target/omega", c.omega);
    from_cfg(j, "/target/centered", c.centered);
    from_cfg(j, "/target/scale", c.scale);
    from_cfg(j, "/target/matrix_re", c.matrix_re);
    from_cfg(j, "/target/matrix_im", c.matrix_im);
    from_cfg(j, "/target/clauses", c.clauses_path);
    from_cfg(j, "/drive/mode", c.drive);
    from_cfg(j, "/drive/gmax", c.gmax);
    from_cfg(j, "/drive/jmax", c.jmax);
    from_cfg(j, "/drive/J0", c.J0);
    from_cfg(j, "/drive/U", c.U_drift);
    from_cfg(j, "/drive/convention", c.convention);
    from_cfg(j, "/steps/N", c.N);
    from_cfg(j, "/steps/T", c.T);
    from_cfg(j, "/optimizer/restarts", c.restarts);
    from_cfg(j, "/optimizer/max_iter", c.max_iter);
    from_cfg(j, "/optimizer/threads", c.threads);
    from_cfg(j, "/optimizer/seed", c.seed);
    from_cfg(j, "/optimizer/objective", c.objective);
    from_cfg(j, "/evolve/cycles", c.evolve_cycles);
    from_cfg(j, "/evolve/psi0", c.psi0);
    from_cfg(j, "/evolve/controls", c.controls_path);
    from_cfg(j, "/adiabatic/cycles", c.ad_cycles);
    from_cfg(j, "/adiabatic/floor", c.floor);
    from_cfg(j, "/adiabatic/schedule", c.schedule);
    from_cfg(j, "/sweep/mode", c.mode);
    from_cfg(j, "/sweep/T_list", c.T_list);
    from_cfg(j, "/sweep/N_list", c.N_list);
    from_cfg(j, "/sweep/M_list", c.M_list);
    from_cfg(j, "/sweep/L_range", c.L_range);
    from_cfg(j, "/sweep/tau", c.tau);
    from_cfg(j, "/sweep/threshold", c.threshold);
    from_cfg(j, "/sweep/T_max", c.T_max);
    from_cfg(j, "/sweep/workers", c.workers);
    from_cfg(j, "/output/dir", c.outdir);
    from_cfg(j, "/output/prefix", c.prefix);
}

json resolved_config(const Config& c, const std::string& command) {
    json j;
    j["command"] = command;
    j["sector"] = {{"L", c.L}, {"M", c.M}, {"stats", c.stats}};
    j["target"] = {{"family", c.family},   {"K", c.K},
                   {"hub", c.hub},         {"U", c.U_target},
                   {"omega", c.omega},     {"centered", c.centered},
                   {"scale", c.scale},     {"matrix_re", c.matrix_re},
                   {"matrix_im", c.matrix_im}, {"clauses", c.clauses_path}};
    j["drive"] = {{"mode", c.drive}, {"gmax", c.gmax}, {"jmax", c.jmax},
                  {"J0", c.J0},      {"U", c.U_drift}, {"convention", c.convention}};
    j["steps"] = {{"N", c.N}, {"T", c.T}};
    j["optimizer"] = {{"restarts", c.restarts},
                      {"max_iter", c.max_iter},
                      {"threads", c.threads},
                      {"seed", c.seed},
                      {"objective", c.objective}};
    j["evolve"] = {{"cycles", c.evolve_cycles}, {"psi0", c.psi0}, {"controls", c.controls_path}};
    j["adiabatic"] = {{"cycles", c.ad_cycles}, {"floor", c.floor}, {"schedule", c.schedule}};
    j["sweep"] = {{"mode", c.mode},           {"T_list", c.T_list},
                  {"N_list", c.N_list},       {"M_list", c.M_list},
                  {"L_range", c.L_range},     {"tau", c.tau},
                  {"threshold", c.threshold}, {"T_max", c.T_max},
                  {"workers", c.workers}};
    j["output"] = {{"dir", c.outdir}, {"prefix", c.prefix}};
    return j;
}

Sector make_sector(const Config& c) {
    Sector s;
    s.L = c.L;
    s.M = c.M;
    if (c.stats == "hardcore") {
        s.stats = Statistics::Hardcore;
    } else if (c.stats == "bosonic") {
        s.stats = Statistics::Bosonic;
    } else {
        throw config_error("stats must be 'hardcore' or 'bosonic'");
    }
    return s;
}

DriveSpec make_drive(const Config& c) {
    DriveSpec d;
    if (c.drive == "g") {
        d.drive_g = true;
        d.drive_J = false;
    } else if (c.drive == "j") {
        d.drive_g = false;
        d.drive_J = true;
    } else if (c.drive == "gj") {
        d.drive_g = true;
        d.drive_J = true;
    } else {
        throw config_error("drive mode must be 'g', 'j', or 'gj'");
    }
    d.gmax = c.gmax;
    d.jmax = c.jmax;
    d.J0 = c.J0;
    d.U = c.U_drift;
    if (c.convention == "number") {
        d.convention = OnsiteConvention::Number;
    } else if (c.convention == "spin_half") {
        d.convention = OnsiteConvention::SpinHalf;
    } else {
        throw config_error("convention must be 'number' or 'spin_half'");
    }
    return d;
}

OptimizeOptions make_opts(const Config& c) {
    OptimizeOptions o;
    o.restarts = c.restarts;
    o.max_iter = c.max_iter;
    o.threads = c.threads;
    o.seed = c.seed;
    if (c.objective == "abs") {
        o.objective = Objective::AbsTrace;
    } else if (c.objective == "real") {
        o.objective = Objective::RealTrace;
    } else {
        throw config_error("objective must be 'abs' or 'real'");
    }
    return o;
}

int center_hub(const Config& c, int L) {
    if (c.hub == 0) return (L + 1) / 2;
    return c.hub;
}

VariableEncoding encoding_for(int n_vars) {
    return n_vars == 3 ? VariableEncoding::builtin3() : VariableEncoding::identity(n_vars);
}

// Target Hamiltonian in the sector basis, scaled by c.scale.
MatC target_hamiltonian(const Config& c, const Sector& sector) {
    MatC H;
    if (c.family == "star" || c.family == "a2a" || c.family == "ring") {
        CouplingGraph graph;
        if (c.family == "star") {
            graph = star_graph(sector.L, center_hub(c, sector.L), c.K);
        } else if (c.family == "a2a") {
            graph = all_to_all(sector.L, c.K);
        } else {
            graph = ring(sector.L, c.K);
        }
        H = sector.stats == Statistics::Hardcore
                ? build_target_spin_jw(sector, graph)
                : build_target_boson(sector, graph, c.U_target);
    } else if (c.family == "sat") {
        if (dim(sector) != 8) throw config_error("sat target needs an 8-dimensional sector");
        H = sat_hamiltonian(c.omega);
    } else if (c.family == "clauses") {
        if (c.clauses_path.empty()) throw config_error("clauses target needs --clauses FILE");
        const ClauseSystem sys = parse_clause_system(read_text_file(c.clauses_path));
        const MultilinearPolynomial poly = system_objective(sys);
        const int n = sys.n_vars;
        if (dim(sector) != (1 << n))
            throw config_error("clauses target needs a sector of dimension 2^n_vars");
        H = c.omega * pauli_to_matrix(objective_to_pauli(poly, encoding_for(n)), n);
    } else if (c.family == "lih") {
        if (dim(sector) != 16) throw config_error("lih target needs a 16-dimensional sector");
        H = lih_hamiltonian();
    } else if (c.family == "diag") {
        const int D = static_cast<int>(dim(sector));
        int n = 0;
        while ((1 << n) < D) ++n;
        if ((1 << n) != D) throw config_error("diag target needs a power-of-two dimension");
        H = diag_initial_hamiltonian(n, c.omega, c.centered);
    } else if (c.family == "file") {
        if (c.matrix_re.empty() || c.matrix_im.empty())
            throw config_error("file target needs --matrix-re and --matrix-im");
        H = read_matrix_csv_files(c.matrix_re, c.matrix_im);
        if (H.rows() != dim(sector)) throw config_error("matrix file dimension mismatch");
        check_hermitian(H, "file target");
    } else {
        throw config_error("unknown target family '" + c.family + "'");
    }
    return c.scale * H;
}

std::ofstream open_out(const Config& c, const std::string& name) {
    fs::create_directories(c.outdir);
    const fs::path path = fs::path(c.outdir) / (c.prefix + name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file " + path.string());
    return out;
}

void run_basis(const Config& c) {
    const Basis basis(make_sector(c));
    std::ofstream out = open_out(c, "basis.csv");
    write_basis_csv(out, basis, resolved_config(c, "basis").dump());
    std::cout << "basis: dim " << basis.size() << "\n";
}

void run_target(const Config& c) {
    const Sector sector = make_sector(c);
    const MatC H = target_hamiltonian(c, sector);
    const std::string cfg = resolved_config(c, "target").dump();
    std::ofstream re = open_out(c, "target_re.csv");
    std::ofstream im = open_out(c, "target_im.csv");
    write_matrix_csv(re, im, H, cfg);
    std::ofstream js = open_out(c, "target.json");
    write_matrix_json(js, H, &sector, cfg);
    std::cout << "target: " << c.family << " dim " << H.rows() << "\n";
}

void run_optimize(const Config& c) {
    const Sector sector = make_sector(c);
    const DriveSpec drive = make_drive(c);
    const ControlProblem problem = chain_problem(sector, drive, c.N, c.T);
    const MatC H_t = target_hamiltonian(c, sector);
    const MatC U_t = expm_i(H_t, c.T);
    const OptimizeOptions opts = make_opts(c);

    auto [seq, report] = optimize(problem, U_t, opts);
    const FloquetResult floq = floquet_from_controls(problem, seq, U_t, opts.objective);
    const double rel_err = (floq.H_eff - H_t).norm() / std::max(H_t.norm(), 1e-300);

    const std::string cfg = resolved_config(c, "optimize").dump();
    {
        std::ofstream out = open_out(c, "controls.csv");
        write_controls_csv(out, seq, chain_control_names(sector, drive), cfg);
    }
    {
        std::ofstream out = open_out(c, "report.json");
        write_report_json(out, report, cfg);
    }
    {
        std::ofstream re = open_out(c, "heff_re.csv");
        std::ofstream im = open_out(c, "heff_im.csv");
        write_matrix_csv(re, im, floq.H_eff, cfg);
    }
    {
        json doc;
        doc["fidelity"] = floq.fidelity_to_target;
        doc["heff_rel_error"] = rel_err;
        doc["near_branch_cut"] = floq.near_branch_cut;
        doc["quasienergies"] = std::vector<double>(
            floq.quasienergies.data(), floq.quasienergies.data() + floq.quasienergies.size());
        doc["config"] = json::parse(cfg);
        std::ofstream out = open_out(c, "floquet.json");
        out << doc.dump(2) << "\n";
    }
    std::cout << "optimize: fidelity " << format_g17(report.best_fidelity) << ", H_eff rel err "
              << format_g17(rel_err) << ", iterations " << report.iterations << "\n";
}

json embedded_config(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line) && !line.empty() && line[0] == '#') {
        const std::string tag = "# config: ";
        if (line.rfind(tag, 0) != 0) continue;
        try {
            return json::parse(line.substr(tag.size()));
        } catch (const json::exception&) {
            return json();
        }
    }
    return json();
}

ControlSequence read_controls_csv(const std::string& path, const std::vector<std::string>& names) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open controls file " + path);
    std::map<std::string, int> row_of;
    for (std::size_t k = 0; k < names.size(); ++k) row_of[names[k]] = static_cast<int>(k);

    struct Cell {
        int step, row;
        double value;
    };
    std::vector<Cell> cells;
    int n_max = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#' || line.rfind("step,", 0) == 0) continue;
        std::stringstream row(line);
        std::string step_s, name, value_s;
        if (!std::getline(row, step_s, ',') || !std::getline(row, name, ',') ||
            !std::getline(row, value_s, ','))
            throw config_error("controls file: bad row '" + line + "'");
        const auto it = row_of.find(name);
        if (it == row_of.end())
            throw config_error("controls file: unknown control '" + name + "'");
        Cell cell{};
        try {
            cell.step = std::stoi(step_s);
            cell.value = std::stod(value_s);
        } catch (const std::exception&) {
            throw config_error("controls file: unparseable row '" + line + "'");
        }
        cell.row = it->second;
        if (cell.step < 1) throw config_error("controls file: steps are 1-based");
        n_max = std::max(n_max, cell.step);
        cells.push_back(cell);
    }
    if (cells.empty()) throw config_error("controls file: no rows");
    ControlSequence seq;
    seq.u = MatR::Constant(names.size(), n_max, std::nan(""));
    for (const Cell& cell : cells) seq.u(cell.row, cell.step - 1) = cell.value;
    if (seq.u.hasNaN()) throw config_error("controls file: missing entries");
    return seq;
}

void run_evolve(const Config& c0, const CLI::App& cmd) {
    Config c = c0;
    if (c.controls_path.empty()) throw config_error("evolve needs --controls FILE");
    // the controls header carries the resolved config of the optimize run;
    // sector, drive, and period come from there unless a flag overrides them
    const json hdr = embedded_config(c.controls_path);
    if (!hdr.is_null()) {
        auto flagged = [&](const char* f) { return cmd.count(f) > 0; };
        if (!flagged("--L")) from_cfg(hdr, "/sector/L", c.L);
        if (!flagged("--M")) from_cfg(hdr, "/sector/M", c.M);
        if (!flagged("--stats")) from_cfg(hdr, "/sector/stats", c.stats);
        if (!flagged("--drive")) from_cfg(hdr, "/drive/mode", c.drive);
        if (!flagged("--gmax")) from_cfg(hdr, "/drive/gmax", c.gmax);
        if (!flagged("--jmax")) from_cfg(hdr, "/drive/jmax", c.jmax);
        if (!flagged("--J0")) from_cfg(hdr, "/drive/J0", c.J0);
        if (!flagged("--U")) from_cfg(hdr, "/drive/U", c.U_drift);
        if (!flagged("--convention")) from_cfg(hdr, "/drive/convention", c.convention);
        if (!flagged("--T")) from_cfg(hdr, "/steps/T", c.T);
    }
    const Sector sector = make_sector(c);
    const DriveSpec drive = make_drive(c);
    const ControlSequence seq =
        read_controls_csv(c.controls_path, chain_control_names(sector, drive));
    const ControlProblem problem =
        chain_problem(sector, drive, static_cast<int>(seq.u.cols()), c.T);
    const MatC F = propagate(problem, seq);

    const int D = problem.dim();
    if (c.psi0 < 0 || c.psi0 >= D) throw config_error("psi0 index out of range");
    VecC psi0 = VecC::Zero(D);
    psi0(c.psi0) = 1.0;
    const std::vector<VecC> traj = stroboscopic_evolve(F, psi0, c.evolve_cycles);

    std::ofstream out = open_out(c, "evolve.csv");
    write_header(out, resolved_config(c, "evolve").dump());
    out << "cycle";
    for (int i = 0; i < D; ++i) out << ",p_" << i;
    out << "\n";
    for (std::size_t n = 0; n < traj.size(); ++n) {
        out << n;
        for (int i = 0; i < D; ++i) out << "," << format_g17(std::norm(traj[n](i)));
        out << "\n";
    }
    std::cout << "evolve: " << c.evolve_cycles << " periods, dim " << D << "\n";
}

void run_adiabatic(const Config& c, bool objective_given) {
    Config cc = c;
    if (!objective_given) cc.objective = "real";  // phase-sensitive tracking by default

    const ClauseSystem sys = cc.clauses_path.empty()
                                 ? builtin_3sat()
                                 : parse_clause_system(read_text_file(cc.clauses_path));
    const int n = sys.n_vars;
    const VariableEncoding enc = encoding_for(n);
    const MatC cost = pauli_to_matrix(objective_to_pauli(system_objective(sys), enc), n);
    const MatC H_final = cc.omega * cost;
    const MatC H_diag = diag_initial_hamiltonian(n, cc.omega, cc.centered);

    Sector sector;
    sector.L = 1 << n;
    sector.M = 1;
    sector.stats = Statistics::Hardcore;
    const DriveSpec drive = make_drive(cc);
    const ControlProblem problem = chain_problem(sector, drive, cc.N, cc.T);

    AdiabaticOptions opts;
    opts.cycles = cc.ad_cycles;
    opts.fidelity_floor = cc.floor;
    if (cc.schedule == "linear") {
        opts.schedule = LambdaSchedule::Linear;
    } else if (cc.schedule == "smoothstep") {
        opts.schedule = LambdaSchedule::Smoothstep;
    } else {
        throw config_error("schedule must be 'linear' or 'smoothstep'");
    }
    opts.grape = make_opts(cc);

    const AdiabaticTrajectory traj = adiabatic_sweep(problem, H_diag, H_final, cost, opts);

    const std::string cfg = resolved_config(cc, "adiabatic").dump();
    {
        std::ofstream out = open_out(cc, "trajectory.csv");
        write_trajectory_csv(out, traj, cfg);
    }
    {
        std::ofstream out = open_out(cc, "trajectory.json");
        write_trajectory_json(out, traj, chain_control_names(sector, drive), cfg);
    }
    const AdiabaticCycle& last = traj.cycles.back();
    std::cout << "adiabatic: lambda " << last.lambda << ", ground fidelity "
              << format_g17(last.ground_fidelity) << ", cost "
              << format_g17(last.cost_expectation);
    if (last.decoded_ok)
        std::cout << ", bits (" << last.decoded[0] << "," << last.decoded[1] << ","
                  << last.decoded[2] << ")";
    std::cout << "\n";
    if (traj.aborted) throw numeric_error("adiabatic sweep aborted: " + traj.abort_reason);
}

struct SweepRow {
    std::vector<double> values;
};

void run_sweep(const Config& raw) {
    Config c = raw;
    {
        int single = 0;
        char extra = 0;
        if (std::sscanf(c.L_range.c_str(), "%d%c", &single, &extra) == 1) c.L = single;
    }
    const std::string cfg = resolved_config(c, "sweep").dump();
    const int workers = c.workers > 0
                            ? c.workers
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto pooled = [&](int n_jobs, const std::function<void(int)>& job) {
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (int i = next.fetch_add(1); i < n_jobs; i = next.fetch_add(1)) job(i);
        };
        const int n_threads = std::min(workers, n_jobs);
        if (n_threads <= 1) {
            worker();
            return;
        }
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    };

    if (c.mode == "tn") {
        if (c.T_list.empty() || c.N_list.empty())
            throw config_error("sweep tn needs --T-list and --N-list");
        const Sector sector = make_sector(c);
        const DriveSpec drive = make_drive(c);
        const MatC H_t = target_hamiltonian(c, sector);
        const int nT = static_cast<int>(c.T_list.size());
        const int nN = static_cast<int>(c.N_list.size());
        std::vector<SweepRow> rows(nT * nN);
        pooled(nT * nN, [&](int i) {
            const double T = c.T_list[i / nN];
            const int N = c.N_list[i % nN];
            const ControlProblem problem = chain_problem(sector, drive, N, T);
            auto [seq, report] = optimize(problem, expm_i(H_t, T), make_opts(c));
            rows[i].values = {T, static_cast<double>(N), report.best_fidelity};
        });
        std::ofstream out = open_out(c, "sweep.csv");
        write_header(out, cfg);
        out << "T,N,best_fidelity\n";
        for (const SweepRow& row : rows)
            out << format_g17(row.values[0]) << "," << static_cast<int>(row.values[1]) << ","
                << format_g17(row.values[2]) << "\n";
        std::cout << "sweep tn: " << rows.size() << " grid points\n";
        return;
    }

    if (c.mode == "tmin") {
        int L_from = 0, L_to = 0;
        if (std::sscanf(c.L_range.c_str(), "%d..%d", &L_from, &L_to) != 2 || L_from > L_to)
            throw config_error("sweep tmin needs --L like '5..10'");
        const int nL = L_to - L_from + 1;
        std::vector<SweepRow> rows(nL);
        pooled(nL, [&](int i) {
            Config ci = c;
            ci.L = L_from + i;
            const Sector sector = make_sector(ci);
            const DriveSpec drive = make_drive(ci);
            const MatC H_t = target_hamiltonian(ci, sector);
            double t_min = std::nan("");
            double f_at = std::nan("");
            for (int steps = 2; steps * ci.tau <= ci.T_max + 1e-9; ++steps) {
                const double T = steps * ci.tau;
                const ControlProblem problem = chain_problem(sector, drive, steps, T);
                auto [seq, report] = optimize(problem, expm_i(H_t, T), make_opts(ci));
                if (report.best_fidelity > ci.threshold) {
                    t_min = T;
                    f_at = report.best_fidelity;
                    break;
                }
            }
            rows[i].values = {static_cast<double>(ci.L), t_min, f_at};
        });
        // least-squares line through the (L, T_min) points that converged
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n_fit = 0;
        for (const SweepRow& row : rows) {
            if (std::isnan(row.values[1])) continue;
            sx += row.values[0];
            sy += row.values[1];
            sxx += row.values[0] * row.values[0];
            sxy += row.values[0] * row.values[1];
            ++n_fit;
        }
        if (n_fit < 2) throw numeric_error("sweep tmin: fewer than two sizes reached threshold");
        const double slope = (n_fit * sxy - sx * sy) / (n_fit * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / n_fit;

        std::ofstream out = open_out(c, "sweep.csv");
        write_header(out, cfg);
        out << "# fit: slope " << format_g17(slope) << ", intercept " << format_g17(intercept)
            << "\n";
        out << "L,T_min,fidelity\n";
        for (const SweepRow& row : rows)
            out << static_cast<int>(row.values[0]) << "," << format_g17(row.values[1]) << ","
                << format_g17(row.values[2]) << "\n";
        json doc;
        doc["slope"] = slope;
        doc["intercept"] = intercept;
        json jrows = json::array();
        for (const SweepRow& row : rows)
            jrows.push_back({{"L", static_cast<int>(row.values[0])},
                             {"T_min", row.values[1]},
                             {"fidelity", row.values[2]}});
        doc["rows"] = std::move(jrows);
        doc["config"] = json::parse(cfg);
        std::ofstream js = open_out(c, "sweep.json");
        js << doc.dump(2) << "\n";
        std::cout << "sweep tmin: slope " << format_g17(slope) << ", intercept "
                  << format_g17(intercept) << "\n";
        return;
    }

    if (c.mode == "lift") {
        if (c.M_list.empty()) throw config_error("sweep lift needs --M-list");
        Config c1 = c;
        c1.M = 1;
        c1.stats = "hardcore";
        const Sector single = make_sector(c1);
        const DriveSpec drive = make_drive(c1);
        const ControlProblem problem = chain_problem(single, drive, c.N, c.T);
        const MatC H_single = target_hamiltonian(c1, single);
        const MatC U_single = expm_i(H_single, c.T);
        auto [seq, report] = optimize(problem, U_single, make_opts(c1));

        std::ofstream out = open_out(c, "sweep.csv");
        write_header(out, cfg);
        out << "# single-particle fidelity " << format_g17(report.best_fidelity) << "\n";
        out << "M,fidelity_vs_compound,fidelity_vs_jw\n";
        for (int M : c.M_list) {
            Sector sector = single;
            sector.M = M;
            const FloquetResult lift =
                lift_single_particle(sector, drive, seq, c.T, U_single, make_opts(c1).objective);
            Config cM = c1;
            cM.M = M;
            const MatC H_jw = target_hamiltonian(cM, sector);
            const double f_jw = make_opts(c1).objective == Objective::AbsTrace
                                    ? fidelity_abs(expm_i(H_jw, c.T), lift.floquet_op)
                                    : fidelity_real(expm_i(H_jw, c.T), lift.floquet_op);
            out << M << "," << format_g17(lift.fidelity_to_target) << "," << format_g17(f_jw)
                << "\n";
        }
        std::cout << "sweep lift: single-particle fidelity " << format_g17(report.best_fidelity)
                  << "\n";
        return;
    }

    throw config_error("sweep mode must be 'tn', 'tmin', or 'lift'");
}

std::string find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    Config c;
    if (const char* env = std::getenv("FLOQ_OUTDIR")) c.outdir = env;

    try {
        const std::string config_path = find_config_arg(argc, argv);
        if (!config_path.empty()) load_config_file(config_path, c);
    } catch (const floq_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"piecewise-constant drive synthesis for chain quantum simulators"};
    app.require_subcommand(1);
    std::string config_path_opt;
    app.add_option("--config", config_path_opt, "JSON config file; flags override its values");

    auto add_sector = [&](CLI::App* sub) {
        sub->add_option("--L", c.L, "number of sites");
        sub->add_option("--M", c.M, "number of excitations");
        sub->add_option("--stats", c.stats, "hardcore | bosonic");
    };
    auto add_target = [&](CLI::App* sub) {
        sub->add_option("--target", c.family, "star | a2a | ring | sat | clauses | lih | diag | file");
        sub->add_option("--K", c.K, "coupling strength of the target graph");
        sub->add_option("--hub", c.hub, "star hub site (1-based; 0 = center)");
        sub->add_option("--U-target", c.U_target, "anharmonicity of the bosonic target");
        sub->add_option("--omega", c.omega, "energy scale of sat/clauses/diag targets");
        sub->add_flag("--centered,!--no-centered", c.centered, "center the diag target spectrum");
        sub->add_option("--scale", c.scale, "overall target scaling factor");
        sub->add_option("--matrix-re", c.matrix_re, "real-part CSV for --target file");
        sub->add_option("--matrix-im", c.matrix_im, "imaginary-part CSV for --target file");
        sub->add_option("--clauses", c.clauses_path, "clause file for --target clauses");
    };
    auto add_drive = [&](CLI::App* sub) {
        sub->add_option("--drive", c.drive, "g | j | gj");
        sub->add_option("--gmax", c.gmax, "onsite drive bound");
        sub->add_option("--jmax", c.jmax, "coupling drive bound");
        sub->add_option("--J0", c.J0, "fixed coupling when not driven");
        sub->add_option("--U", c.U_drift, "chain anharmonicity");
        sub->add_option("--convention", c.convention, "number | spin_half");
    };
    auto add_steps = [&](CLI::App* sub) {
        sub->add_option("--N", c.N, "steps per period");
        sub->add_option("--T", c.T, "period");
    };
    auto add_optimizer = [&](CLI::App* sub) {
        sub->add_option("--restarts", c.restarts, "independent optimizer restarts");
        sub->add_option("--max-iter", c.max_iter, "iteration cap per restart");
        sub->add_option("--threads", c.threads, "restart workers (0 = hardware)");
        sub->add_option("--seed", c.seed, "optimizer seed");
        sub->add_option("--objective", c.objective, "abs | real");
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--outdir", c.outdir, "output directory")->envname("FLOQ_OUTDIR");
        sub->add_option("--prefix", c.prefix, "output filename prefix");
    };

    CLI::App* cmd_basis = app.add_subcommand("basis", "list the occupation basis");
    add_sector(cmd_basis);
    add_output(cmd_basis);

    CLI::App* cmd_target = app.add_subcommand("target", "emit a target Hamiltonian");
    add_sector(cmd_target);
    add_target(cmd_target);
    add_output(cmd_target);

    CLI::App* cmd_optimize = app.add_subcommand("optimize", "synthesize a driving sequence");
    add_sector(cmd_optimize);
    add_target(cmd_optimize);
    add_drive(cmd_optimize);
    add_steps(cmd_optimize);
    add_optimizer(cmd_optimize);
    add_output(cmd_optimize);

    CLI::App* cmd_evolve = app.add_subcommand("evolve", "stroboscopic evolution of a drive");
    add_sector(cmd_evolve);
    add_drive(cmd_evolve);
    add_steps(cmd_evolve);
    add_output(cmd_evolve);
    cmd_evolve->add_option("--controls", c.controls_path, "controls CSV from 'optimize'");
    cmd_evolve->add_option("--cycles", c.evolve_cycles, "number of periods");
    cmd_evolve->add_option("--psi0", c.psi0, "initial basis-state index");

    CLI::App* cmd_adiabatic = app.add_subcommand("adiabatic", "deform a diagonal start into a clause Hamiltonian");
    add_drive(cmd_adiabatic);
    add_steps(cmd_adiabatic);
    add_optimizer(cmd_adiabatic);
    add_output(cmd_adiabatic);
    cmd_adiabatic->add_option("--clauses", c.clauses_path, "clause file (default: built-in three-clause system)");
    cmd_adiabatic->add_option("--cycles", c.ad_cycles, "deformation cycles");
    cmd_adiabatic->add_option("--omega", c.omega, "energy scale of both endpoint Hamiltonians");
    cmd_adiabatic->add_flag("--centered,!--no-centered", c.centered, "center the diagonal start");
    cmd_adiabatic->add_option("--floor", c.floor, "per-cycle optimization fidelity floor");
    cmd_adiabatic->add_option("--schedule", c.schedule, "linear | smoothstep");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "grid studies: tn, tmin, lift");
    cmd_sweep->add_option("--L", c.L_range, "sites; a range like 5..10 in tmin mode");
    cmd_sweep->add_option("--M", c.M, "number of excitations");
    cmd_sweep->add_option("--stats", c.stats, "hardcore | bosonic");
    add_target(cmd_sweep);
    add_drive(cmd_sweep);
    add_steps(cmd_sweep);
    add_optimizer(cmd_sweep);
    add_output(cmd_sweep);
    cmd_sweep->add_option("--mode", c.mode, "tn | tmin | lift");
    cmd_sweep->add_option("--T-list", c.T_list, "periods for tn mode")->delimiter(',');
    cmd_sweep->add_option("--N-list", c.N_list, "step counts for tn mode")->delimiter(',');
    cmd_sweep->add_option("--M-list", c.M_list, "excitation numbers for lift mode")->delimiter(',');
    cmd_sweep->add_option("--tau", c.tau, "fixed step length for tmin mode");
    cmd_sweep->add_option("--threshold", c.threshold, "fidelity threshold for tmin mode");
    cmd_sweep->add_option("--T-max", c.T_max, "largest period tried in tmin mode");
    cmd_sweep->add_option("--workers", c.workers, "grid workers (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_basis->parsed()) {
            run_basis(c);
        } else if (cmd_target->parsed()) {
            run_target(c);
        } else if (cmd_optimize->parsed()) {
            run_optimize(c);
        } else if (cmd_evolve->parsed()) {
            run_evolve(c);
        } else if (cmd_adiabatic->parsed()) {
            run_adiabatic(c, cmd_adiabatic->count("--objective") > 0);
        } else if (cmd_sweep->parsed()) {
            run_sweep(c);
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

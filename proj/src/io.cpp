#include "floq/io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace floq {

namespace {

using nlohmann::json;

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json matrix_entries(const MatC& A) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            row.push_back({A(r, c).real(), A(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

MatR read_real_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        std::vector<double> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw config_error("matrix csv: unparseable cell '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw config_error("matrix csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw config_error("matrix csv: no data rows");
    MatR A(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) A(r, c) = rows[r][c];
    return A;
}

}  // namespace

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_header(std::ostream& out, const std::string& config_json) {
    out << "# generated: " << timestamp_utc() << "\n";
    out << "# units: energies in J, times in 1/J, hbar = 1\n";
    out << "# config: " << (config_json.empty() ? "{}" : config_json) << "\n";
}

void write_matrix_csv(std::ostream& re, std::ostream& im, const MatC& A,
                      const std::string& config_json) {
    for (std::ostream* out : {&re, &im}) write_header(*out, config_json);
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        for (Eigen::Index c = 0; c < A.cols(); ++c) {
            const char* sep = c + 1 < A.cols() ? "," : "\n";
            re << format_g17(A(r, c).real()) << sep;
            im << format_g17(A(r, c).imag()) << sep;
        }
    }
}

void write_matrix_json(std::ostream& out, const MatC& A, const Sector* sector,
                       const std::string& config_json) {
    json doc;
    doc["dim"] = A.rows();
    if (sector) {
        doc["sector"] = {{"L", sector->L},
                         {"M", sector->M},
                         {"stats", sector->stats == Statistics::Bosonic ? "bosonic" : "hardcore"}};
    } else {
        doc["sector"] = nullptr;
    }
    doc["entries"] = matrix_entries(A);
    doc["config"] = config_json.empty() ? json::object() : json::parse(config_json);
    out << doc.dump(2) << "\n";
}

MatC read_matrix_csv(std::istream& re, std::istream& im) {
    const MatR real = read_real_csv(re);
    const MatR imag = read_real_csv(im);
    if (real.rows() != imag.rows() || real.cols() != imag.cols())
        throw config_error("matrix csv: real and imaginary parts have different shapes");
    return real.cast<cxd>() + cxd(0.0, 1.0) * imag.cast<cxd>();
}

MatC read_matrix_csv_files(const std::string& path_re, const std::string& path_im) {
    std::ifstream re(path_re), im(path_im);
    if (!re) throw config_error("cannot open matrix file " + path_re);
    if (!im) throw config_error("cannot open matrix file " + path_im);
    return read_matrix_csv(re, im);
}

void write_basis_csv(std::ostream& out, const Basis& basis, const std::string& config_json) {
    write_header(out, config_json);
    out << "index";
    for (int l = 1; l <= basis.sector().L; ++l) out << ",occ_" << l;
    out << "\n";
    for (int i = 0; i < basis.size(); ++i) {
        out << i;
        for (int n : basis.state(i)) out << "," << n;
        out << "\n";
    }
}

void write_controls_csv(std::ostream& out, const ControlSequence& seq,
                        const std::vector<std::string>& control_names,
                        const std::string& config_json) {
    const int R = static_cast<int>(seq.u.rows());
    if (!control_names.empty() && static_cast<int>(control_names.size()) != R)
        throw config_error("controls csv: one name per control row");
    write_header(out, config_json);
    out << "step,control_name,value\n";
    for (int j = 0; j < seq.u.cols(); ++j) {
        for (int k = 0; k < R; ++k) {
            const std::string name =
                control_names.empty() ? "u" + std::to_string(k + 1) : control_names[k];
            out << (j + 1) << "," << name << "," << format_g17(seq.u(k, j)) << "\n";
        }
    }
}

void write_report_json(std::ostream& out, const OptimizationReport& report,
                       const std::string& config_json) {
    json doc;
    doc["best_fidelity"] = report.best_fidelity;
    doc["iterations"] = report.iterations;
    doc["restarts_used"] = report.restarts_used;
    doc["fidelity_history"] = report.fidelity_history;
    doc["seed"] = report.seed;
    doc["objective"] = report.objective == Objective::AbsTrace ? "abs_trace" : "real_trace";
    doc["best_restart"] = report.best_restart;
    doc["warning_no_improvement"] = report.warning_no_improvement;
    doc["warning_zero_trace"] = report.warning_zero_trace;
    doc["config"] = config_json.empty() ? json::object() : json::parse(config_json);
    out << doc.dump(2) << "\n";
}

void write_trajectory_csv(std::ostream& out, const AdiabaticTrajectory& traj,
                          const std::string& config_json) {
    write_header(out, config_json);
    const int D = traj.cycles.empty() ? 0 : static_cast<int>(traj.cycles.front().quasienergies.size());
    out << "cycle,lambda,ground_fidelity,cost_expectation";
    for (int i = 0; i < D; ++i) out << ",e_" << i;
    out << "\n";
    for (const AdiabaticCycle& rec : traj.cycles) {
        out << rec.cycle << "," << format_g17(rec.lambda) << ","
            << format_g17(rec.ground_fidelity) << "," << format_g17(rec.cost_expectation);
        for (int i = 0; i < rec.quasienergies.size(); ++i)
            out << "," << format_g17(rec.quasienergies(i));
        out << "\n";
    }
}

void write_trajectory_json(std::ostream& out, const AdiabaticTrajectory& traj,
                           const std::vector<std::string>& control_names,
                           const std::string& config_json) {
    json doc;
    doc["aborted"] = traj.aborted;
    doc["abort_reason"] = traj.abort_reason;
    json cycles = json::array();
    for (const AdiabaticCycle& rec : traj.cycles) {
        json c;
        c["cycle"] = rec.cycle;
        c["lambda"] = rec.lambda;
        c["grape_fidelity"] = rec.grape_fidelity;
        c["ground_fidelity"] = rec.ground_fidelity;
        c["cost_expectation"] = rec.cost_expectation;
        c["quasienergies"] = std::vector<double>(rec.quasienergies.data(),
                                                 rec.quasienergies.data() +
                                                     rec.quasienergies.size());
        if (rec.decoded_ok) {
            c["decoded"] = rec.decoded;
        } else {
            c["decoded"] = nullptr;
        }
        json controls = json::array();
        for (int k = 0; k < rec.controls.u.rows(); ++k) {
            json row;
            row["name"] = control_names.empty() || k >= static_cast<int>(control_names.size())
                              ? "u" + std::to_string(k + 1)
                              : control_names[k];
            row["values"] = std::vector<double>(rec.controls.u.row(k).begin(),
                                                rec.controls.u.row(k).end());
            controls.push_back(std::move(row));
        }
        c["controls"] = std::move(controls);
        cycles.push_back(std::move(c));
    }
    doc["cycles"] = std::move(cycles);
    json fs = json::array();
    for (Eigen::Index i = 0; i < traj.final_state.size(); ++i)
        fs.push_back({traj.final_state(i).real(), traj.final_state(i).imag()});
    doc["final_state"] = std::move(fs);
    doc["config"] = config_json.empty() ? json::object() : json::parse(config_json);
    out << doc.dump(2) << "\n";
}

std::string strip_timestamp_lines(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# generated", 0) == 0) continue;
        out << line << "\n";
    }
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open file for writing: " + path);
    out << text;
    if (!out) throw numeric_error("failed writing " + path);
}

}  // namespace floq

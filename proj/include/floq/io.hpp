#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "floq/basis.hpp"
#include "floq/floquet.hpp"
#include "floq/grape.hpp"
#include "floq/types.hpp"

namespace floq {

// 17 significant digits: round-trips doubles exactly.
std::string format_g17(double x);

// Every writer starts with '#' header lines: a timestamp (the one line
// excluded from determinism comparisons) and the resolved config as JSON.
void write_header(std::ostream& out, const std::string& config_json);

void write_matrix_csv(std::ostream& re, std::ostream& im, const MatC& A,
                      const std::string& config_json);
void write_matrix_json(std::ostream& out, const MatC& A, const Sector* sector,
                       const std::string& config_json);
MatC read_matrix_csv(std::istream& re, std::istream& im);
MatC read_matrix_csv_files(const std::string& path_re, const std::string& path_im);

void write_basis_csv(std::ostream& out, const Basis& basis, const std::string& config_json);

void write_controls_csv(std::ostream& out, const ControlSequence& seq,
                        const std::vector<std::string>& control_names,
                        const std::string& config_json);
void write_report_json(std::ostream& out, const OptimizationReport& report,
                       const std::string& config_json);

void write_trajectory_csv(std::ostream& out, const AdiabaticTrajectory& traj,
                          const std::string& config_json);
void write_trajectory_json(std::ostream& out, const AdiabaticTrajectory& traj,
                           const std::vector<std::string>& control_names,
                           const std::string& config_json);

// Strips lines beginning with "# generated" so byte comparisons ignore the
// timestamp header.
std::string strip_timestamp_lines(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace floq

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rtf/convert.hpp"
#include "rtf/stability.hpp"
#include "rtf/train.hpp"

// On-disk formats. Parameters, state-space systems, modal forms and
// configs are JSON; signals and kernels are CSV with a "t,c0,c1,..." header
// and one row per time step. Errors: ParseError for malformed text,
// SchemaError for wrong shapes or types, VersionError for version != 1,
// IoError for unreadable or unwritable files.
namespace rtf::io {

inline constexpr int kFormatVersion = 1;

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

std::string params_to_json(const RtfParams& params);
RtfParams params_from_json(std::string_view text);
RtfParams load_params(const std::string& path);
void save_params(const std::string& path, const RtfParams& params);

// Rows of `values` are channels; the text is transposed to one line per t.
std::string series_to_csv(const RowMajorXd& values);
RowMajorXd series_from_csv(std::string_view text);
Signal load_signal(const std::string& path);
void save_signal(const std::string& path, const Signal& signal);
Kernel load_kernel(const std::string& path);
void save_kernel(const std::string& path, const Kernel& kernel);

// {"version":1,"systems":[{"A":[[..]],"B":[..],"C":[..],"h0":x}, ...]}
std::string ssms_to_json(const std::vector<DenseSsm<double>>& systems);
std::vector<DenseSsm<double>> ssms_from_json(std::string_view text);

// {"version":1,"channels":[{"h0":x,"poles":[[re,im],..],"residues":[[re,im],..]}, ...]}
std::string modal_to_json(const std::vector<ModalParams>& channels);
std::vector<ModalParams> modal_from_json(std::string_view text);

// JSON array with one report per denominator row.
std::string reports_to_json(const std::vector<StabilityReport>& reports);

// Every TrainConfig field is optional; missing ones keep their defaults.
TrainConfig train_config_from_json(std::string_view text);
std::string train_config_to_json(const TrainConfig& config);

std::string loss_trace_to_csv(const std::vector<double>& trace);

}  // namespace rtf::io

#include "rtf/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace rtf::io {

using json = nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorCode::SchemaError, msg); }

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void check_version(const json& doc) {
  if (!doc.is_object()) schema("top-level value must be an object");
  if (!doc.contains("version")) schema("missing \"version\"");
  if (!doc["version"].is_number_integer()) schema("\"version\" must be an integer");
  if (doc["version"].get<long long>() != kFormatVersion)
    throw Error(ErrorCode::VersionError,
                "unsupported version " + doc["version"].dump() + " (expected 1)");
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) schema(std::string("missing \"") + key + "\"");
  return obj[key];
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) schema(what + " must be a number");
  return v.get<double>();
}

Index integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) schema(what + " must be an integer");
  return Index(v.get<long long>());
}

VectorXd vector(const json& v, const std::string& what, Index expected = -1) {
  if (!v.is_array()) schema(what + " must be an array");
  if (expected >= 0 && Index(v.size()) != expected)
    schema(what + " has " + std::to_string(v.size()) + " entries, expected " +
           std::to_string(expected));
  VectorXd out(Index(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(Index(i)) = number(v[i], what);
  return out;
}

RowMajorXd matrix(const json& v, const std::string& what, Index rows, Index cols) {
  if (!v.is_array()) schema(what + " must be an array of rows");
  if (Index(v.size()) != rows)
    schema(what + " has " + std::to_string(v.size()) + " rows, expected " +
           std::to_string(rows));
  RowMajorXd out(rows, cols);
  for (Index r = 0; r < rows; ++r) out.row(r) = vector(v[std::size_t(r)], what, cols).transpose();
  return out;
}

template <typename Derived>
json to_json_vector(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <typename Derived>
json to_json_matrix(const Eigen::MatrixBase<Derived>& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) out.push_back(to_json_vector(m.row(r)));
  return out;
}

json complex_vector(const VectorXcd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

VectorXcd complex_vector(const json& v, const std::string& what) {
  if (!v.is_array()) schema(what + " must be an array of [re, im] pairs");
  VectorXcd out(Index(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const VectorXd pair = vector(v[i], what, 2);
    out(Index(i)) = Complex(pair(0), pair(1));
  }
  return out;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path);
  return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out.write(text.data(), std::streamsize(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
}

std::string params_to_json(const RtfParams& params) {
  json doc;
  doc["version"] = kFormatVersion;
  doc["state_size"] = params.state_size();
  doc["channels"] = params.channels();
  doc["num_denominators"] = params.num_denominators();
  doc["h0"] = to_json_vector(params.h0());
  doc["a"] = to_json_matrix(params.a());
  doc["b"] = to_json_matrix(params.b());
  const bool truncated = params.numerator_form() == NumeratorForm::truncated;
  doc["numerator_form"] = truncated ? "truncated" : "corrected";
  doc["trained_length"] = truncated ? json(*params.trained_length()) : json(nullptr);
  return dump(doc);
}

RtfParams params_from_json(std::string_view text) {
  const json doc = parse(text);
  check_version(doc);
  const Index n = integer(field(doc, "state_size"), "state_size");
  const Index d = integer(field(doc, "channels"), "channels");
  const Index m = integer(field(doc, "num_denominators"), "num_denominators");
  if (n < 1 || d < 1 || m < 1) schema("sizes must be positive");
  if (d % m != 0) schema("num_denominators must divide channels");
  const VectorXd h0 = vector(field(doc, "h0"), "h0", d);
  RowMajorXd a = matrix(field(doc, "a"), "a", m, n);
  RowMajorXd b = matrix(field(doc, "b"), "b", d, n);

  const json& form_field = field(doc, "numerator_form");
  if (!form_field.is_string()) schema("numerator_form must be a string");
  const std::string form_name = form_field.get<std::string>();
  NumeratorForm form;
  if (form_name == "corrected")
    form = NumeratorForm::corrected;
  else if (form_name == "truncated")
    form = NumeratorForm::truncated;
  else
    schema("numerator_form must be \"corrected\" or \"truncated\"");

  std::optional<Index> trained_length;
  const json& tl = field(doc, "trained_length");
  if (!tl.is_null()) trained_length = integer(tl, "trained_length");
  if (form == NumeratorForm::truncated && (!trained_length || *trained_length < 1))
    schema("truncated numerator requires a positive trained_length");
  if (form == NumeratorForm::corrected && trained_length)
    schema("trained_length must be null for a corrected numerator");
  try {
    return RtfParams(std::move(a), std::move(b), h0, form, trained_length);
  } catch (const Error& e) {
    schema(e.what());
  }
}

RtfParams load_params(const std::string& path) { return params_from_json(read_file(path)); }

void save_params(const std::string& path, const RtfParams& params) {
  write_file(path, params_to_json(params));
}

std::string series_to_csv(const RowMajorXd& values) {
  std::string out = "t";
  for (Index c = 0; c < values.rows(); ++c) out += ",c" + std::to_string(c);
  out += '\n';
  for (Index t = 0; t < values.cols(); ++t) {
    out += std::to_string(t);
    for (Index c = 0; c < values.rows(); ++c) {
      out += ',';
      out += format_double(values(c, t));
    }
    out += '\n';
  }
  return out;
}

RowMajorXd series_from_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    pos = end + 1;
  }
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty CSV");

  auto split = [](std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                         : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };

  const auto header = split(lines[0]);
  if (header.size() < 2 || header[0] != "t")
    schema("CSV header must be t,c0,c1,...");
  for (std::size_t c = 1; c < header.size(); ++c)
    if (header[c] != "c" + std::to_string(c - 1)) schema("CSV header must be t,c0,c1,...");
  const Index channels = Index(header.size()) - 1;
  const Index length = Index(lines.size()) - 1;

  RowMajorXd values(channels, length);
  for (Index t = 0; t < length; ++t) {
    const auto cells = split(lines[std::size_t(t + 1)]);
    if (Index(cells.size()) != channels + 1)
      schema("CSV row " + std::to_string(t) + " is not rectangular");
    for (Index c = 0; c <= channels; ++c) {
      const std::string cell(cells[std::size_t(c)]);
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size())
        throw Error(ErrorCode::ParseError, "bad number \"" + cell + "\" in CSV row " +
                                               std::to_string(t));
      if (c == 0) {
        if (v != double(t)) schema("CSV t column must count up from 0");
      } else {
        values(c - 1, t) = v;
      }
    }
  }
  return values;
}

Signal load_signal(const std::string& path) { return Signal(series_from_csv(read_file(path))); }

void save_signal(const std::string& path, const Signal& signal) {
  write_file(path, series_to_csv(signal.values));
}

Kernel load_kernel(const std::string& path) { return Kernel(series_from_csv(read_file(path))); }

void save_kernel(const std::string& path, const Kernel& kernel) {
  write_file(path, series_to_csv(kernel.values));
}

std::string ssms_to_json(const std::vector<DenseSsm<double>>& systems) {
  json list = json::array();
  for (const DenseSsm<double>& s : systems) {
    json entry;
    entry["A"] = to_json_matrix(s.A);
    entry["B"] = to_json_vector(s.B);
    entry["C"] = to_json_vector(s.C);
    entry["h0"] = s.h0;
    list.push_back(std::move(entry));
  }
  return dump({{"version", kFormatVersion}, {"systems", list}});
}

std::vector<DenseSsm<double>> ssms_from_json(std::string_view text) {
  const json doc = parse(text);
  check_version(doc);
  const json& list = field(doc, "systems");
  if (!list.is_array() || list.empty()) schema("\"systems\" must be a non-empty array");
  std::vector<DenseSsm<double>> out;
  for (const json& entry : list) {
    const json& a = field(entry, "A");
    if (!a.is_array() || a.empty()) schema("A must be a non-empty array of rows");
    const Index n = Index(a.size());
    DenseSsm<double> s;
    s.A = matrix(a, "A", n, n);
    s.B = vector(field(entry, "B"), "B", n);
    s.C = vector(field(entry, "C"), "C", n).transpose();
    s.h0 = number(field(entry, "h0"), "h0");
    out.push_back(std::move(s));
  }
  return out;
}

std::string modal_to_json(const std::vector<ModalParams>& channels) {
  json list = json::array();
  for (const ModalParams& m : channels)
    list.push_back({{"h0", m.h0},
                    {"poles", complex_vector(m.poles)},
                    {"residues", complex_vector(m.residues)}});
  return dump({{"version", kFormatVersion}, {"channels", list}});
}

std::vector<ModalParams> modal_from_json(std::string_view text) {
  const json doc = parse(text);
  check_version(doc);
  const json& list = field(doc, "channels");
  if (!list.is_array()) schema("\"channels\" must be an array");
  std::vector<ModalParams> out;
  for (const json& entry : list) {
    ModalParams m;
    m.h0 = number(field(entry, "h0"), "h0");
    m.poles = complex_vector(field(entry, "poles"), "poles");
    m.residues = complex_vector(field(entry, "residues"), "residues");
    if (m.poles.size() != m.residues.size()) schema("poles and residues differ in length");
    out.push_back(std::move(m));
  }
  return out;
}

std::string reports_to_json(const std::vector<StabilityReport>& reports) {
  json list = json::array();
  for (const StabilityReport& r : reports)
    list.push_back({{"jury_stable", r.jury_stable},
                    {"pole_radii", to_json_vector(r.pole_radii)},
                    {"montel_margin", r.montel_margin}});
  return dump(list);
}

TrainConfig train_config_from_json(std::string_view text) {
  const json doc = parse(text);
  if (!doc.is_object()) schema("config must be an object");
  if (doc.contains("version")) check_version(doc);
  TrainConfig c;
  auto get_index = [&](const char* key, Index& dst) {
    if (doc.contains(key)) dst = integer(doc[key], key);
  };
  auto get_double = [&](const char* key, double& dst) {
    if (doc.contains(key)) dst = number(doc[key], key);
  };
  get_index("state_size", c.state_size);
  get_index("channels", c.channels);
  get_index("num_denominators", c.num_denominators);
  get_index("seq_len", c.seq_len);
  get_index("delay", c.delay);
  get_double("band_fraction", c.band_fraction);
  get_double("learning_rate", c.learning_rate);
  get_index("steps", c.steps);
  get_index("batch_size", c.batch_size);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) schema("seed must be a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("project_montel")) {
    if (!doc["project_montel"].is_boolean()) schema("project_montel must be a boolean");
    c.project_montel = doc["project_montel"].get<bool>();
  }
  for (const auto& item : doc.items()) {
    static const char* known[] = {"version", "state_size", "channels", "num_denominators",
                                  "seq_len", "delay", "band_fraction", "learning_rate",
                                  "steps", "batch_size", "seed", "project_montel"};
    if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known))
      schema("unknown config key \"" + item.key() + "\"");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    schema(e.what());
  }
  return c;
}

std::string train_config_to_json(const TrainConfig& c) {
  json doc = {{"version", kFormatVersion},
              {"state_size", c.state_size},
              {"channels", c.channels},
              {"num_denominators", c.num_denominators},
              {"seq_len", c.seq_len},
              {"delay", c.delay},
              {"band_fraction", c.band_fraction},
              {"learning_rate", c.learning_rate},
              {"steps", c.steps},
              {"batch_size", c.batch_size},
              {"seed", c.seed},
              {"project_montel", c.project_montel}};
  return dump(doc);
}

std::string loss_trace_to_csv(const std::vector<double>& trace) {
  std::string out = "step,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out += std::to_string(i + 1) + "," + format_double(trace[i]) + "\n";
  return out;
}

}  // namespace rtf::io

#include "rtf/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rtf/bench.hpp"
#include "rtf/convert.hpp"
#include "rtf/io.hpp"
#include "rtf/selftest.hpp"
#include "rtf/spectral.hpp"
#include "rtf/stability.hpp"
#include "rtf/statespace.hpp"
#include "rtf/train.hpp"

namespace rtf::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Index positive_length(long long len, const char* what) {
  if (len < 1) throw UsageError(std::string(what) + " must be positive");
  return Index(len);
}

void cmd_kernel(const std::string& params_path, long long len_arg, const std::string& out) {
  const Index len = positive_length(len_arg, "--len");
  RtfParams params = io::load_params(params_path);
  // Corrected parameters are truncated at the requested length first, so
  // the output is the exact first `len` samples rather than an aliased sum.
  if (params.numerator_form() == NumeratorForm::corrected) params = to_truncated(params, len);
  io::save_kernel(out, kernel_generate(params, len));
}

void cmd_apply(const std::string& params_path, const std::string& input, const std::string& mode,
               const std::string& out) {
  const RtfParams params = io::load_params(params_path);
  const Signal u = io::load_signal(input);
  io::save_signal(out, mode == "fft" ? apply_fft(params, u) : apply_recurrent(params, u));
}

void cmd_convert(const std::string& direction, const std::string& in, const std::string& out) {
  const std::string text = io::read_file(in);
  if (direction == "ssm2tf") {
    const std::vector<DenseSsm<double>> systems = io::ssms_from_json(text);
    const Index n = systems.front().state_size();
    const Index d = Index(systems.size());
    RowMajorXd a(d, n), b(d, n);
    VectorXd h0(d);
    for (Index c = 0; c < d; ++c) {
      if (systems[std::size_t(c)].state_size() != n)
        throw Error(ErrorCode::SchemaError, "all systems must share one state size");
      const RtfParams tf = ssm_to_tf(systems[std::size_t(c)]);
      a.row(c) = tf.a().row(0);
      b.row(c) = tf.b().row(0);
      h0(c) = tf.h0()(0);
    }
    io::save_params(out, RtfParams(std::move(a), std::move(b), std::move(h0)));
  } else if (direction == "tf2ssm") {
    const RtfParams params = to_corrected(io::params_from_json(text));
    std::vector<DenseSsm<double>> systems;
    for (Index c = 0; c < params.channels(); ++c) systems.push_back(tf_to_ssm(params, c));
    io::write_file(out, io::ssms_to_json(systems));
  } else {
    const RtfParams params = to_corrected(io::params_from_json(text));
    std::vector<ModalParams> modal;
    for (Index c = 0; c < params.channels(); ++c) modal.push_back(tf_to_modal(params, c));
    io::write_file(out, io::modal_to_json(modal));
  }
}

void cmd_check(const std::string& params_path, const std::string& out, std::ostream& stdout_) {
  const RtfParams params = io::load_params(params_path);
  std::vector<StabilityReport> reports;
  for (Index r = 0; r < params.num_denominators(); ++r)
    reports.push_back(stability_report(params.a().row(r).transpose()));
  const std::string text = io::reports_to_json(reports);
  stdout_ << text;
  if (!out.empty()) io::write_file(out, text);
}

void cmd_correct(const std::string& params_path, long long len_arg, const std::string& out) {
  const RtfParams params = io::load_params(params_path);
  if (params.numerator_form() == NumeratorForm::truncated) {
    if (len_arg != 0 && len_arg != *params.trained_length())
      throw Error(ErrorCode::InvalidParams,
                  "--len differs from the file's trained_length " +
                      std::to_string(*params.trained_length()));
    io::save_params(out, to_corrected(params));
  } else {
    io::save_params(out, to_truncated(params, positive_length(len_arg, "--len")));
  }
}

void cmd_train_delay(const std::string& config_path, const std::string& out,
                     const std::string& params_out, std::ostream& stdout_) {
  const TrainConfig config = io::train_config_from_json(io::read_file(config_path));
  const TrainReport report = train_delay(config);
  io::write_file(out, io::loss_trace_to_csv(report.loss_trace));
  if (!params_out.empty()) io::save_params(params_out, report.final_params);
  char line[128];
  std::snprintf(line, sizeof line, "final_rmse %.17g\nwall_seconds %.3f\n", report.final_rmse,
                report.wall_seconds);
  stdout_ << line;
  for (const std::string& w : report.warnings) stdout_ << "warning: " << w << '\n';
}

void cmd_distill(const std::string& target_path, long long n_arg, const std::string& out,
                 const std::string& init, std::uint64_t seed, long long iterations, double lr,
                 std::ostream& stdout_) {
  const Kernel target = io::load_kernel(target_path);
  DistillOptions options;
  options.iterations = positive_length(iterations, "--iterations");
  options.learning_rate = lr;
  if (init == "zero")
    options.init = ZeroInit{};
  else if (init == "uniform_montel")
    options.init = UniformMontelInit{seed};
  else
    options.init = XavierInit{seed};
  const DistillResult result = distill(target, positive_length(n_arg, "--state-size"), options);
  io::save_params(out, result.params);
  char line[64];
  std::snprintf(line, sizeof line, "mse %.17g\n", result.mse);
  stdout_ << line;
}

std::vector<Index> parse_list(const std::string& text, const char* what) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(Index(v));
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + " must be a comma-separated list of positive integers");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + " is empty");
  return out;
}

void cmd_bench(const std::string& lens, const std::string& states, int repeats, long long channels,
               std::uint64_t seed, const std::string& out) {
  BenchOptions options;
  options.lengths = parse_list(lens, "--lens");
  options.state_sizes = parse_list(states, "--states");
  options.repeats = repeats;
  options.channels = positive_length(channels, "--channels");
  options.seed = seed;
  if (repeats < 3) throw UsageError("--repeats must be >= 3");
  std::ostringstream csv;
  write_bench_csv(csv, run_bench(options));
  io::write_file(out, csv.str());
}

int cmd_selftest(std::ostream& stdout_) {
  const SelftestOptions options = selftest_options_from_env();
  if (!options.fault.empty()) {
    const std::vector<std::string> names = selftest_check_names();
    if (std::find(names.begin(), names.end(), options.fault) == names.end())
      throw UsageError("RTF_SELFTEST_FAULT names no check: " + options.fault);
  }
  bool ok = true;
  for (const SelftestCheck& c : run_selftest(options)) {
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-22s worst=%.3e tol=%.1e cases=%ld\n",
                  c.passed ? "PASS" : "FAIL", c.name.c_str(), c.worst, c.tolerance,
                  long(c.cases));
    stdout_ << line;
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rational transfer function filters: kernels, conversion, training, benchmarks"};
  app.name("rtf");
  app.require_subcommand(1);

  std::string params, output, input, mode = "fft", config, params_out, target, init = "zero";
  std::string lens, states, direction;
  long long len = 0, state_size = 0, iterations = 5000, channels = 1;
  std::uint64_t seed = 0;
  double lr = 1e-2;
  int repeats = 7;

  CLI::App* kernel = app.add_subcommand("kernel", "Write the first L kernel samples as CSV");
  kernel->add_option("--params", params, "Parameter JSON")->required();
  kernel->add_option("--len", len, "Kernel length L")->required();
  kernel->add_option("--out", output, "Output CSV")->required();

  CLI::App* apply = app.add_subcommand("apply", "Filter a signal");
  apply->add_option("--params", params, "Parameter JSON")->required();
  apply->add_option("--input", input, "Input signal CSV")->required();
  apply->add_option("--mode", mode, "fft or recurrent")
      ->check(CLI::IsMember({"fft", "recurrent"}))
      ->capture_default_str();
  apply->add_option("--out", output, "Output signal CSV")->required();

  CLI::App* convert = app.add_subcommand("convert", "Convert between realizations");
  convert->add_option("direction", direction, "ssm2tf, tf2ssm or tf2modal")
      ->required()
      ->check(CLI::IsMember({"ssm2tf", "tf2ssm", "tf2modal"}));
  convert->add_option("--in", input, "Input JSON")->required();
  convert->add_option("--out", output, "Output JSON")->required();

  CLI::App* check = app.add_subcommand("check", "Print stability reports as JSON");
  check->add_option("--params", params, "Parameter JSON")->required();
  check->add_option("--out", output, "Also write the reports here");

  CLI::App* correct =
      app.add_subcommand("correct", "Truncated -> corrected, or corrected -> truncated at --len");
  correct->add_option("--params", params, "Parameter JSON")->required();
  correct->add_option("--len", len, "Trained length (required for corrected input)");
  correct->add_option("--out", output, "Output JSON")->required();

  CLI::App* train = app.add_subcommand("train-delay", "Train on the delay task");
  train->add_option("--config", config, "Config JSON")->required();
  train->add_option("--out", output, "Loss trace CSV (step,loss)")->required();
  train->add_option("--params-out", params_out, "Write trained parameters");

  CLI::App* distill_cmd = app.add_subcommand("distill", "Fit parameters to a target kernel");
  distill_cmd->add_option("--target", target, "Target kernel CSV")->required();
  distill_cmd->add_option("--state-size", state_size, "State size n")->required();
  distill_cmd->add_option("--out", output, "Output parameter JSON")->required();
  distill_cmd->add_option("--init", init, "zero, uniform_montel or xavier")
      ->check(CLI::IsMember({"zero", "uniform_montel", "xavier"}))
      ->capture_default_str();
  distill_cmd->add_option("--seed", seed, "Seed for random initializations")->capture_default_str();
  distill_cmd->add_option("--iterations", iterations, "Adam iterations")->capture_default_str();
  distill_cmd->add_option("--lr", lr, "Learning rate")->capture_default_str();

  CLI::App* bench = app.add_subcommand("bench", "Scaling benchmark, CSV output");
  bench->add_option("--lens", lens, "Sequence lengths, comma separated")->required();
  bench->add_option("--states", states, "State sizes, comma separated")->required();
  bench->add_option("--repeats", repeats, "Timed repeats per cell (>= 3)")->capture_default_str();
  bench->add_option("--channels", channels, "Channels")->capture_default_str();
  bench->add_option("--seed", seed, "Seed")->capture_default_str();
  bench->add_option("--out", output, "Output CSV")->required();

  CLI::App* selftest = app.add_subcommand("selftest", "Run the built-in oracle suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (*kernel) cmd_kernel(params, len, output);
    else if (*apply) cmd_apply(params, input, mode, output);
    else if (*convert) cmd_convert(direction, input, output);
    else if (*check) cmd_check(params, output, out);
    else if (*correct) cmd_correct(params, len, output);
    else if (*train) cmd_train_delay(config, output, params_out, out);
    else if (*distill_cmd)
      cmd_distill(target, state_size, output, init, seed, iterations, lr, out);
    else if (*bench) cmd_bench(lens, states, repeats, channels, seed, output);
    else if (*selftest) return cmd_selftest(out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidParams && *selftest) {
      err << "usage error: " << e.what() << '\n';
      return 2;
    }
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rtf::cli

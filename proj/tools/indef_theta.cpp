#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <mutex>

#include "indef_theta/job.hpp"

using namespace indef_theta;

namespace {

constexpr int kPass = 0, kMathFailure = 1, kInputError = 2;

void write_or_print(const std::string &text, const std::string &path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ParseError, "cannot write '" + path + "'");
  out << text;
}

std::string join_lines(const std::vector<std::string> &lines) {
  std::string s;
  for (const auto &l : lines) s += l + "\n";
  return s;
}

int cmd_expand(const std::string &path, const std::string &out) {
  write_or_print(expand_job(load_job(path)), out);
  return kPass;
}

int cmd_verify(const std::string &path, const std::string &out, const std::string &report) {
  Job job = load_job(path);
  JobResult r = verify_job(job);
  if (!out.empty()) write_or_print(r.series, out);
  write_or_print(join_lines(r.report), report);
  if (!report.empty()) std::cout << join_lines(r.report);
  if (!r.ok) {
    std::cerr << "IdentityMismatch: " << r.report.front() << "\n";
    return kMathFailure;
  }
  return kPass;
}

int cmd_reproduce(const std::string &which, long maxQ, unsigned jobs) {
  std::vector<std::string> ids = which == "all" ? example_ids() : std::vector<std::string>{which};
  std::vector<Job> batch;
  for (const auto &id : ids) {
    Job job = job_from_example(get_example(id));
    if (maxQ > 0) job.maxQ = make_rational(maxQ);
    batch.push_back(std::move(job));
  }
  std::vector<std::string> lines(batch.size());
  std::vector<int> status(batch.size(), kPass);
  parallel_for(batch.size(), std::max(1u, jobs), [&](std::size_t i) {
    try {
      JobResult r = verify_job(batch[i]);
      lines[i] = r.report.front();
      status[i] = r.ok ? kPass : kMathFailure;
    } catch (const Error &e) {
      lines[i] = batch[i].name + ": " + e.what();
      status[i] = is_input_error(e.code()) ? kInputError : kMathFailure;
    }
  });
  int worst = kPass;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::cout << lines[i] << "\n";
    worst = std::max(worst, status[i]);
  }
  return worst;
}

int cmd_pell(long long D, bool oddX) {
  PellSolution s = pell_solve(D, oddX);
  std::cout << "D = " << D << ": x = " << s.x.get_str() << ", y = " << s.y.get_str()
            << (s.fundamental ? " (fundamental)" : " (from the fundamental solution by doubling)") << "\n";
  Integer check = s.x * s.x - Integer(static_cast<long>(D)) * s.y * s.y;
  return check == 1 ? kPass : kMathFailure;
}

int cmd_modularity(const std::string &path, int gammas, int taus, double tol, std::uint64_t seed, const std::string &format) {
  Job job = load_job(path);
  auto reports = check_job_modularity(job, gammas, taus, tol, seed);
  bool ok = true;
  for (const auto &r : reports) {
    ok = ok && r.passed();
    if (format == "jsonl") {
      Json j{{"test", r.test},       {"gamma", r.gamma}, {"tau", r.tau},
             {"residual", r.residual}, {"tol", r.tol},     {"status", r.status_text()}};
      std::cout << j.dump() << "\n";
    } else {
      std::cout << r.line() << "\n";
    }
  }
  if (reports.empty()) {
    std::cerr << "no term with g c independent of c\n";
    return kInputError;
  }
  return ok ? kPass : kMathFailure;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Theta series of indefinite quadratic forms: exact expansions and numeric checks"};
  app.require_subcommand(1);
  std::string job, out, report, which, format = "text";
  long maxQ = 0;
  unsigned jobs = 1;
  long long D = 0;
  bool oddX = false;
  int gammas = 25, taus = 3;
  double tol = 1e-6;
  std::uint64_t seed = 1;

  auto *expand = app.add_subcommand("expand", "expand a job's family sum and print the canonical series");
  expand->add_option("job", job, "job file")->required();
  expand->add_option("-o,--out", out, "write the series here instead of stdout");

  auto *verify = app.add_subcommand("verify", "expand a job and compare it with its identity");
  verify->add_option("job", job, "job file")->required();
  verify->add_option("-o,--out", out, "series file");
  verify->add_option("-r,--report", report, "report file");

  auto *reproduce = app.add_subcommand("reproduce", "verify built-in examples");
  reproduce->add_option("id", which, "example id or 'all'")->required();
  reproduce->add_option("--max-q", maxQ, "coefficient horizon (default: per example)");
  reproduce->add_option("--jobs", jobs, "examples run in parallel")->check(CLI::PositiveNumber);

  auto *pell = app.add_subcommand("pell", "fundamental solution of x^2 - D y^2 = 1");
  pell->add_option("D", D, "non-square D >= 2")->required();
  pell->add_flag("--odd-x", oddX, "double the solution when x is even");

  auto *modularity = app.add_subcommand("check-modularity", "Gamma_0(N) transformation checks at random points");
  modularity->add_option("job", job, "job file")->required();
  modularity->add_option("--gammas", gammas, "random gammas per tau")->check(CLI::PositiveNumber);
  modularity->add_option("--taus", taus, "random tau per term")->check(CLI::PositiveNumber);
  modularity->add_option("--tol", tol, "residual tolerance")->check(CLI::PositiveNumber);
  modularity->add_option("--seed", seed, "random seed");
  modularity->add_option("--format", format, "text or jsonl")->check(CLI::IsMember({"text", "jsonl"}));

  auto *exportCmd = app.add_subcommand("export", "print a built-in example as a job file");
  exportCmd->add_option("id", which, "example id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    if (*expand) return cmd_expand(job, out);
    if (*verify) return cmd_verify(job, out, report);
    if (*reproduce) return cmd_reproduce(which, maxQ, jobs);
    if (*pell) return cmd_pell(D, oddX);
    if (*modularity) return cmd_modularity(job, gammas, taus, tol, seed, format);
    if (*exportCmd) {
      std::cout << job_to_json(job_from_example(get_example(which))).dump(2) << "\n";
      return kPass;
    }
  } catch (const Error &e) {
    std::cerr << e.what() << "\n";
    return is_input_error(e.code()) ? kInputError : kMathFailure;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

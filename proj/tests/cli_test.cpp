#include "nltv/cli.hpp"
#include "nltv/io.hpp"
#include "nltv/schemes_1d.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nltv::cli::Command;
using nltv::cli::RunConfig;

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "nltv_cli_" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = nltv::cli::main(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

TEST(ParseArgs, EvalDefaults) {
  const RunConfig c = nltv::cli::parse_args({"eval", "--family", "pc", "--input", "s.csv"});
  EXPECT_EQ(c.command, Command::Eval);
  EXPECT_EQ(c.family, "pc");
  EXPECT_EQ(c.input_path, "s.csv");
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.samples, 1'000'000);
  EXPECT_FALSE(c.scale.has_value());
}

TEST(ParseArgs, VerifyEchoesEveryValue) {
  const RunConfig c = nltv::cli::parse_args(
      {"verify", "--family", "image", "--kernel", "disc", "--n", "3", "--samples", "100000", "--seed", "7"});
  EXPECT_EQ(c.command, Command::Verify);
  EXPECT_EQ(c.family, "image");
  EXPECT_EQ(c.kernel, "disc");
  EXPECT_EQ(c.n, 3);
  EXPECT_EQ(c.samples, 100'000);
  EXPECT_EQ(c.seed, 7u);
}

TEST(ParseArgs, NonPositiveAlphaIsRejected) {
  for (const char* alpha : {"-1", "0"}) {
    try {
      nltv::cli::parse_args({"denoise", "--input", "f.csv", "--alpha", alpha, "--out", "o.csv"});
      FAIL() << "expected an exception";
    } catch (const nltv::cli::UsageError& e) {
      EXPECT_NE(std::string(e.what()).find("alpha must be positive"), std::string::npos) << e.what();
    }
  }
  const Outcome o = run({"denoise", "--input", "f.csv", "--alpha", "-1", "--out", "o.csv"});
  EXPECT_EQ(o.code, nltv::cli::kExitUsage);
  EXPECT_NE(o.err.find("alpha must be positive"), std::string::npos);
}

TEST(ParseArgs, GammaScalesAndTable) {
  const RunConfig g =
      nltv::cli::parse_args({"gamma", "--input", "f.csv", "--alpha", "0.5", "--scales", "2,4,8,16"});
  EXPECT_EQ(g.scales, (std::vector<double>{2, 4, 8, 16}));
  EXPECT_THROW(nltv::cli::parse_args({"gamma", "--input", "f.csv", "--alpha", "0.5", "--scales", "4,2"}),
               nltv::cli::UsageError);
  const RunConfig t = nltv::cli::parse_args({"table", "haar", "--kmax", "2", "--nmax", "9"});
  EXPECT_EQ(t.command, Command::Table);
  EXPECT_EQ(t.kmax, 2);
  EXPECT_EQ(t.nmax, 9);
}

TEST(ParseArgs, UsageErrors) {
  EXPECT_THROW(nltv::cli::parse_args({}), nltv::cli::UsageError);
  EXPECT_THROW(nltv::cli::parse_args({"frobnicate"}), nltv::cli::UsageError);
  EXPECT_THROW(nltv::cli::parse_args({"eval", "--family", "nope", "--input", "x"}), nltv::cli::UsageError);
  EXPECT_THROW(nltv::cli::parse_args({"eval", "--family", "pc"}), nltv::cli::UsageError);
  EXPECT_THROW(nltv::cli::parse_args({"eval", "--family", "haar", "--k", "2", "--j", "9", "--scale", "3"}),
               nltv::cli::UsageError);
  EXPECT_THROW(nltv::cli::parse_args({"verify", "--family", "pc", "--samples", "10"}), nltv::cli::UsageError);
  EXPECT_THROW(nltv::cli::parse_args({"verify", "--family", "pc", "--n", "abc"}), nltv::cli::UsageError);
  EXPECT_EQ(run({"eval", "--kernel", "triangle"}).code, nltv::cli::kExitUsage);
}

TEST(ParseArgs, HelpExitsCleanly) {
  const Outcome o = run({"--help"});
  EXPECT_EQ(o.code, nltv::cli::kExitOk);
  EXPECT_NE(o.out.find("denoise"), std::string::npos);
}

TEST(Canonical, CoversTheConfiguration) {
  const RunConfig a = nltv::cli::parse_args({"verify", "--family", "pc", "--seed", "1"});
  const RunConfig b = nltv::cli::parse_args({"verify", "--family", "pc", "--seed", "2"});
  EXPECT_NE(nltv::cli::canonical(a), nltv::cli::canonical(b));
  EXPECT_EQ(nltv::cli::canonical(a), nltv::cli::canonical(nltv::cli::parse_args({"verify", "--seed", "1", "--family", "pc"})));
}

TEST(Eval, PrintsTheClosedForm) {
  const std::string path = temp_path("step.csv");
  nltv::write_text_file(path, "0\n1\n0\n1\n");
  const Outcome o = run({"eval", "--family", "pc", "--input", path});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto l = lines(o.out);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0].rfind("# nltv-version 1.0.0, config-hash ", 0), 0u);
  EXPECT_EQ(l[1], "family,kernel,n,value");
  EXPECT_EQ(l[2], "pc,box,4,3");
  const Outcome h = run({"eval", "--family", "haar", "--k", "0", "--j", "1", "--scale", "3"});
  EXPECT_EQ(lines(h.out).back(), "haar,0,1,3,2");
}

TEST(Eval, ImagesFromPgm) {
  const std::string path = temp_path("edge.pgm");
  nltv::write_text_file(path, "P2\n2 2\n255\n0 255\n0 255\n");
  const Outcome o = run({"eval", "--family", "image", "--kernel", "disc", "--input", path});
  ASSERT_EQ(o.code, 0) << o.err;
  const std::string last = lines(o.out).back();
  const double v = std::stod(last.substr(last.rfind(',') + 1));
  EXPECT_NEAR(v, 10.0 / (6.0 * std::numbers::pi), 1e-15);
}

TEST(ExitCodes, MissingInputIsAnIoError) {
  const Outcome o = run({"eval", "--family", "pc", "--input", temp_path("does_not_exist.csv")});
  EXPECT_EQ(o.code, nltv::cli::kExitIo);
  EXPECT_FALSE(o.err.empty());
  const std::string bad = temp_path("bad.csv");
  nltv::write_text_file(bad, "1\nx1\n");
  EXPECT_EQ(run({"eval", "--family", "pc", "--input", bad}).code, nltv::cli::kExitIo);
}

TEST(ExitCodes, VerifyToleranceExceeded) {
  const Outcome ok = run({"verify", "--family", "pc", "--n", "6", "--method", "gauss"});
  EXPECT_EQ(ok.code, nltv::cli::kExitOk) << ok.err;
  const Outcome tight = run({"verify", "--family", "image", "--n", "3", "--samples", "10000", "--tol", "1e-12"});
  EXPECT_EQ(tight.code, nltv::cli::kExitVerify);
  EXPECT_NE(tight.err.find("exceeds tolerance"), std::string::npos);
}

TEST(ExitCodes, NonConvergence) {
  const std::string in = temp_path("noisy.csv");
  nltv::write_text_file(in, "0\n0.3\n0.1\n1\n0.8\n1.1\n0.2\n0\n");
  const Outcome o = run({"denoise", "--input", in, "--alpha", "0.05", "--max-iter", "2", "--out", temp_path("o.csv")});
  EXPECT_EQ(o.code, nltv::cli::kExitNonConvergence);
  const Outcome fine = run({"denoise", "--input", in, "--alpha", "0.05", "--out", temp_path("o.csv")});
  EXPECT_EQ(fine.code, nltv::cli::kExitOk) << fine.err;
}

TEST(Denoise, WritesMinimizerAndTrace) {
  const std::string in = temp_path("step8.csv");
  nltv::write_text_file(in, "0\n0\n0\n0\n1\n1\n1\n1\n");
  const std::string out = temp_path("step8_out.csv");
  const std::string trace = temp_path("step8_trace.csv");
  const Outcome o = run({"denoise", "--input", in, "--alpha", "0.01", "--out", out, "--trace", trace});
  ASSERT_EQ(o.code, 0) << o.err;
  const std::vector<double> u = nltv::read_signal_csv(out);
  ASSERT_EQ(u.size(), 8u);
  // lambda = alpha * n = 0.08 spread over four cells on each side.
  EXPECT_NEAR(u[0], 0.02, 1e-8);
  EXPECT_NEAR(u[7], 0.98, 1e-8);
  const auto t = lines(nltv::read_text_file(trace));
  ASSERT_GE(t.size(), 3u);
  EXPECT_EQ(t[1], "iteration,energy");
  EXPECT_EQ(t[2].rfind("1,", 0), 0u);
}

TEST(Denoise, ImagesRoundTripThroughPgm) {
  const std::string in = temp_path("img.pgm");
  nltv::write_text_file(in, "P2\n3 3\n255\n0 0 255\n0 20 255\n0 0 255\n");
  const std::string out = temp_path("img_out.pgm");
  ASSERT_EQ(run({"denoise", "--input", in, "--alpha", "0.01", "--out", out}).code, 0);
  EXPECT_EQ(nltv::read_pgm(out).n(), 3);
  const std::string csv = temp_path("s.csv");
  nltv::write_text_file(csv, "0\n1\n");
  EXPECT_EQ(run({"denoise", "--input", csv, "--alpha", "0.01", "--out", temp_path("bad.pgm")}).code,
            nltv::cli::kExitUsage);
}

TEST(Gamma, EmitsTheTable) {
  const std::string in = temp_path("gamma.csv");
  std::string text;
  for (int i = 0; i < 32; ++i) text += (i < 16 ? "0.05\n" : "0.9\n");
  nltv::write_text_file(in, text);
  const Outcome o = run({"gamma", "--input", in, "--alpha", "0.01", "--scales", "2,4,8"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto l = lines(o.out);
  ASSERT_EQ(l.size(), 6u);
  EXPECT_EQ(l[1], "# reference taut-string");
  EXPECT_EQ(l[2], "scale,distance,energy,iterations,converged");
  EXPECT_EQ(l[3].rfind("2,", 0), 0u);
}

TEST(TableHaar, ReproducesTheStatedValues) {
  const Outcome o = run({"table", "haar", "--kmax", "3", "--nmax", "16"});
  ASSERT_EQ(o.code, 0);
  const auto l = lines(o.out);
  ASSERT_GE(l.size(), 3u);
  EXPECT_EQ(l[1], "k,j,n,value");
  int checked = 0;
  for (std::size_t i = 2; i < l.size(); ++i) {
    int k, j, n;
    char value[64];
    ASSERT_EQ(std::sscanf(l[i].c_str(), "%d,%d,%d,%63s", &k, &j, &n, value), 4) << l[i];
    const double v = std::stod(value);
    EXPECT_EQ(v, nltv::eval_haar({k, j}, n));
    const double root = std::sqrt(std::ldexp(1.0, k));
    if (k == 0 && j == 0) EXPECT_EQ(v, 0.0);
    if (k == 0 && j == 1) EXPECT_EQ(v, n == 1 ? 2.0 * std::numbers::ln2 : 2.0);
    if (k >= 1 && n >= (2 << k)) {
      const bool marginal = j == 1 || j == (1 << k);
      EXPECT_EQ(v, (marginal ? 3.0 : 4.0) * root);
      ++checked;
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(Determinism, RepeatedRunsAreByteIdentical) {
  const std::vector<std::vector<std::string>> commands{
      {"verify", "--family", "image", "--kernel", "square", "--n", "3", "--samples", "20000", "--seed", "7"},
      {"verify", "--family", "spline", "--n", "5", "--samples", "20000", "--seed", "3"},
      {"table", "haar", "--kmax", "2", "--nmax", "8"},
  };
  for (const auto& args : commands) {
    const Outcome a = run(args);
    const Outcome b = run(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.code, b.code);
  }
}

}  // namespace

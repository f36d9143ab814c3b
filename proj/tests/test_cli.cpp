#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "chansim/json_io.hpp"

namespace {

const char* kCli = CHANSIM_CLI_PATH;
const std::string kRepo = CHANSIM_REPO_DIR;

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args, const std::string& tag) {
  std::string out_path = "cli_test_" + tag + ".out";
  std::string cmd = std::string(kCli) + " " + args + " > " + out_path + " 2>&1";
  int status = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, ss.str()};
}

std::string fixture(const std::string& rel) { return kRepo + "/" + rel; }

}  // namespace

TEST_CASE("cli: inner check reports the closure verdict with exit 0") {
  RunResult r = run_cli(
      "check-inner-p2p --instance " +
          fixture("share/examples/bec_bsc_p2p.json") + " --aux " +
          fixture("share/examples/constant_u_degrading_aux.json"),
      "inner");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("CLOSURE_IN") != std::string::npos);
}

TEST_CASE("cli: capacity refutation exits 2 for pipeline use") {
  RunResult r = run_cli("check-outer-p2p --instance " +
                            fixture("share/examples/bec_bsc005_p2p.json") +
                            " --seed 7",
                        "outer");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("OUT") != std::string::npos);
}

TEST_CASE("cli: fme reproduces the single-sender region") {
  RunResult r =
      run_cli("fme --system " + fixture("share/fixtures/p2p_binning.sys") +
                  " --eliminate R~ --compare " +
                  fixture("share/fixtures/p2p_region.target"),
              "fme");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("compare: EQUAL") != std::string::npos);
}

TEST_CASE("cli: malformed input exits 1 with a diagnostic") {
  {
    std::ofstream bad("cli_empty.json");
  }
  RunResult r = run_cli(
      "check-inner-p2p --instance cli_empty.json --aux " +
          fixture("share/examples/constant_u_degrading_aux.json"),
      "bad");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("error:") != std::string::npos);

  RunResult r2 = run_cli("no-such-command", "nosuch");
  CHECK(r2.exit_code != 0);
}

TEST_CASE("cli: json report round-trips through the shipped schemas") {
  RunResult r = run_cli(
      "--format json --output cli_report.json check-inner-p2p --instance " +
          fixture("share/examples/bec_bsc_p2p.json") + " --aux " +
          fixture("share/examples/constant_u_degrading_aux.json"),
      "json");
  CHECK(r.exit_code == 0);

  chansim::Json doc = chansim::load_json_file("cli_report.json");
  chansim::Json env_schema = chansim::load_json_file(
      fixture("share/schemas/report_envelope.schema.json"));
  CHECK(chansim::validate_against_schema(doc, env_schema) == "");
  chansim::Json region_schema = chansim::load_json_file(
      fixture("share/schemas/region_report.schema.json"));
  CHECK(chansim::validate_against_schema(doc["report"], region_schema) == "");

  RunResult v =
      run_cli("validate --file cli_report.json --schema " +
                  fixture("share/schemas/report_envelope.schema.json"),
              "validate");
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("valid") != std::string::npos);
}

TEST_CASE("cli: reports reproduce byte-identically across runs and workers") {
  std::string base = "--format json search-inner-p2p --instance " +
                     fixture("share/examples/bec_bsc_p2p.json") +
                     " --seed 99 --restarts 3 --iters 40";
  RunResult a = run_cli(base + " --workers 1", "det1");
  RunResult b = run_cli(base + " --workers 1", "det2");
  RunResult c = run_cli(base + " --workers 4", "det4");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  // worker count shows up in the echoed config but must not affect the
  // numeric report fields
  chansim::Json ja = chansim::Json::parse(a.out);
  chansim::Json jc = chansim::Json::parse(c.out);
  CHECK(ja["report"].dump() == jc["report"].dump());
}

TEST_CASE("cli: every remaining subcommand round-trips once") {
  RunResult mac = run_cli(
      "check-inner-mac --instance " +
          fixture("share/examples/independent_mac.json") + " --aux " +
          fixture("share/examples/constant_mac_aux.json"),
      "mac");
  CHECK(mac.exit_code == 0);
  CHECK(mac.out.find("CLOSURE_IN") != std::string::npos);

  RunResult bc = run_cli(
      "check-inner-bc --instance " +
          fixture("share/examples/independent_bc.json") + " --aux " +
          fixture("share/examples/constant_bc_aux.json"),
      "bc");
  CHECK(bc.exit_code == 0);
  CHECK(bc.out.find("CLOSURE_IN") != std::string::npos);

  RunResult cuff = run_cli(
      "check-cuff --instance " + fixture("share/examples/bec_bsc_p2p.json") +
          " --aux " + fixture("share/examples/copy_cuff_aux.json"),
      "cuff");
  CHECK(cuff.exit_code == 0);
  CHECK(cuff.out.find("STRICT_IN") != std::string::npos);

  RunResult eo = run_cli(
      "eval-outer --resource " +
          fixture("share/examples/bec_resource.kernel.json") + " --seed 4",
      "evalouter");
  CHECK(eo.exit_code == 0);
  CHECK(eo.out.find("best_value   0.5000") != std::string::npos);

  RunResult nb = run_cli(
      "check-nonbayesian --target " +
          fixture("share/examples/bsc005_target.kernel.json") +
          " --resource " + fixture("share/examples/bec_resource.kernel.json") +
          " --seed 4 --input-grid 4",
      "nonbayes");
  CHECK(nb.exit_code == 2);  // capacity refutation survives maximization

  RunResult sm = run_cli(
      "search-inner-mac --instance " +
          fixture("share/examples/independent_mac.json") +
          " --seed 3 --restarts 2 --iters 30 --card-u 1 --card-v 1",
      "searchmac");
  CHECK(sm.exit_code == 0);

  RunResult sb = run_cli(
      "search-inner-bc --instance " +
          fixture("share/examples/independent_bc.json") +
          " --seed 3 --restarts 2 --iters 30 --card-u 1 --card-v 1 --card-w 1",
      "searchbc");
  CHECK(sb.exit_code == 0);

  RunResult cs = run_cli(
      "casestudy-bec-bsc --e 0.5 --p-grid 0.05:0.45:0.2 --seed 6 "
      "--restarts 2 --iters 40",
      "casestudy");
  CHECK(cs.exit_code == 0);
  CHECK(cs.out.find("refuted-by-capacity") != std::string::npos);
  CHECK(cs.out.find("feasible-by-degrading") != std::string::npos);
}

TEST_CASE("cli: osrb-sim emits the documented csv columns") {
  RunResult r = run_cli(
      "osrb-sim --instance " +
          fixture("share/examples/strict_margin_p2p.json") + " --aux " +
          fixture("share/examples/strict_margin_aux.json") +
          " --n 2 --rate-g 0.5 --rate-w 0.5 --seeds 2 --seed 5 --mode exact",
      "sim");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("n,seed,protocol,tv_joint,sw_error_prob", 0) == 0);
  int lines = 0;
  for (char ch : r.out)
    if (ch == '\n') ++lines;
  CHECK(lines == 3);  // header + two seeds
}

#include <doctest.h>

#include "firecrest/machine/machine.hpp"
#include "support/harness.hpp"

using namespace firecrest;
using namespace firecrest::machine;

namespace {

struct ExecFixture {
    test_support::TempDir dir;
    test_support::TestClock clock;
    MachineConfig config{.name = "m", .slots = 2, .default_wall_time_seconds = 60,
                         .clock = "manual"};
    Machine m{config, dir.path() / "m", {"alice", "bob"}, clock.fn()};

    delegation::ExecutionResult run(const std::string& cmd, const std::string& input = {}) {
        return m.executor().execute("alice", cmd, input);
    }
};

}  // namespace

TEST_SUITE_BEGIN("executor");

TEST_CASE("filesystem commands map through with proper quoting") {
    ExecFixture f;
    CHECK(f.run("mkdir -p \"/home/alice/my dir/sub\"").exit_code == 0);
    CHECK(f.run("put \"/home/alice/my dir/sub/file.txt\"", "payload").exit_code == 0);
    auto got = f.run("get \"/home/alice/my dir/sub/file.txt\"");
    CHECK(got.exit_code == 0);
    CHECK(got.output == "payload");

    auto listing = f.run("ls \"/home/alice/my dir\"");
    CHECK(listing.exit_code == 0);
    auto entries = nlohmann::json::parse(listing.output);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0]["name"] == "sub");
    CHECK(entries[0]["type"] == "directory");

    CHECK(f.run("mv \"/home/alice/my dir/sub/file.txt\" /home/alice/file.txt").exit_code == 0);
    CHECK(f.run("file /home/alice/file.txt").output == "ASCII text");
    CHECK(f.run("chmod 700 /home/alice/file.txt").exit_code == 0);
    CHECK(f.run("chown alice:bob /home/alice/file.txt").exit_code == 0);
    CHECK(f.run("ln -s /home/alice/file.txt /home/alice/link").exit_code == 0);
    CHECK(f.run("rsync \"/home/alice/my dir\" /home/alice/copied").exit_code == 0);
    CHECK(f.run("rm -r \"/home/alice/my dir\"").exit_code == 0);
    CHECK(f.run("ls \"/home/alice/my dir\"").http_status == 404);
}

TEST_CASE("errors carry exit codes and http status hints") {
    ExecFixture f;
    auto missing = f.run("get /home/alice/nope");
    CHECK(missing.exit_code != 0);
    CHECK(missing.http_status == 404);

    auto escape = f.run("get /etc/passwd");
    CHECK(escape.exit_code != 0);
    CHECK(escape.http_status == 400);
    CHECK(escape.error_id == "sandbox_escape");

    CHECK(f.run("frobnicate /x").http_status == 400);
    CHECK(f.run("").exit_code != 0);
    CHECK(f.run("ls \"unbalanced").exit_code != 0);
}

TEST_CASE("scheduler commands: sbatch, squeue, sacct, scancel") {
    ExecFixture f;
    f.run("mkdir -p /home/alice/run");
    f.run("put /home/alice/run/job.sh", "#SBATCH --time=00:00:10\necho out\n");
    auto submitted = f.run("sbatch /home/alice/run/job.sh");
    CHECK(submitted.exit_code == 0);
    CHECK(submitted.output.rfind("Submitted batch job 1", 0) == 0);

    auto queue = f.run("squeue --json -u alice");
    CHECK(queue.exit_code == 0);
    auto jobs = nlohmann::json::parse(queue.output);
    REQUIRE(jobs.size() == 1);
    CHECK(jobs[0]["job_id"] == 1);
    CHECK(jobs[0]["workdir"] == "/home/alice/run");

    // Only the principal's own jobs are queryable.
    CHECK(f.run("squeue --json -u bob").http_status == 403);
    CHECK(f.run("sacct --json -u bob").http_status == 403);

    CHECK(f.run("scancel 1").exit_code == 0);
    auto acct = nlohmann::json::parse(f.run("sacct --json -u alice").output);
    REQUIRE(acct.size() == 1);
    CHECK(acct[0]["state"] == "CANCELLED");

    auto parse_fail = f.run("put /home/alice/run/bad.sh");
    parse_fail = f.run("sbatch /home/alice/run/bad.sh");
    CHECK(parse_fail.exit_code != 0);  // empty script refuses to parse
    CHECK(f.run("scancel notanumber").exit_code != 0);
}

TEST_SUITE_END();

#include <doctest.h>

#include <regex>

#include "firecrest/machine/sandbox_fs.hpp"
#include "firecrest/scheduler/scheduler_sim.hpp"
#include "firecrest/util/errors.hpp"
#include "support/harness.hpp"

using namespace firecrest;
using namespace firecrest::scheduler;

namespace {

struct SimFixture {
    test_support::TempDir dir;
    test_support::TestClock clock;
    machine::SandboxFs fsbox{dir.path() / "m", {"alice", "bob"}};
    MachineConfig config;
    std::unique_ptr<SchedulerSim> sim;

    explicit SimFixture(int slots = 2) {
        fsbox.ensure_user_home("alice");
        fsbox.ensure_user_home("bob");
        config.name = "m";
        config.slots = slots;
        config.default_wall_time_seconds = 60;
        config.clock = "manual";
        sim = std::make_unique<SchedulerSim>(config, fsbox, clock.fn());
    }

    std::int64_t submit(const std::string& owner, const std::string& text,
                        const std::string& workdir) {
        ParseError err;
        auto script = parse_sbatch_script(text, err);
        REQUIRE_MESSAGE(script, err.message);
        return sim->submit(owner, *script, workdir, "job.sh");
    }
};

}  // namespace

TEST_SUITE_BEGIN("scheduler");

TEST_CASE("sbatch script parsing") {
    ParseError err;
    auto ok = parse_sbatch_script(
        "#!/bin/bash\n#SBATCH --job-name=demo\n#SBATCH --time=00:01:30\n"
        "#SBATCH --output=custom.out\n#SBATCH --mem=4G\necho hi\n",
        err);
    REQUIRE(ok);
    CHECK(ok->job_name == "demo");
    CHECK(ok->wall_time_seconds == 90);
    CHECK(ok->output_path == "custom.out");
    CHECK(ok->body == "echo hi\n");
    REQUIRE(ok->warnings.size() == 1);  // --mem ignored with a warning record

    CHECK(!parse_sbatch_script("#SBATCH --time=badvalue\necho\n", err));
    CHECK(err.message.find("invalid time limit") != std::string::npos);
    CHECK(!parse_sbatch_script("#SBATCH nonsense\n", err));
    CHECK(!parse_sbatch_script("", err));

    auto exit_script = parse_sbatch_script("#!/bin/bash\nwork\nexit 3\n", err);
    REQUIRE(exit_script);
    CHECK(exit_script->body_exit_code == 3);
}

TEST_CASE("sbatch output format matches the real convention") {
    SimFixture f;
    auto id = f.submit("alice", "#!/bin/bash\nsleep 10\n", "/home/alice");
    std::string line = "Submitted batch job " + std::to_string(id);
    CHECK(std::regex_match(line, std::regex(R"(Submitted batch job \d+)")));
    CHECK(id == 1);
    auto id2 = f.submit("alice", "#!/bin/bash\nsleep 10\n", "/home/alice");
    CHECK(id2 == 2);  // monotonic ids
}

TEST_CASE("dispatch, completion and output file on tick") {
    SimFixture f;
    f.fsbox.mkdir("alice", "/home/alice/run", false);
    auto id = f.submit("alice", "#SBATCH --time=00:00:30\necho payload\n", "/home/alice/run");
    CHECK(f.sim->find_job(id)->state == JobState::PENDING);

    f.sim->tick(1);
    auto job = *f.sim->find_job(id);
    CHECK(job.state == JobState::RUNNING);
    CHECK(job.start_time == 0);  // dispatched at submit time, not tick time

    f.sim->tick(30);
    job = *f.sim->find_job(id);
    CHECK(job.state == JobState::COMPLETED);
    CHECK(job.end_time == job.start_time + 30);
    CHECK(job.exit_code == 0);

    auto out = f.fsbox.read_file("alice", "/home/alice/run/slurm-" + std::to_string(id) +
                                              ".out");
    CHECK(out.find("echo payload") != std::string::npos);
}

TEST_CASE("slot limit: third job waits for a free slot") {
    SimFixture f(/*slots=*/2);
    auto a = f.submit("alice", "#SBATCH --time=00:00:10\nx\n", "/home/alice");
    auto b = f.submit("alice", "#SBATCH --time=00:00:20\nx\n", "/home/alice");
    auto c = f.submit("alice", "#SBATCH --time=00:00:05\nx\n", "/home/alice");

    f.sim->tick(1);
    CHECK(f.sim->find_job(a)->state == JobState::RUNNING);
    CHECK(f.sim->find_job(b)->state == JobState::RUNNING);
    CHECK(f.sim->find_job(c)->state == JobState::PENDING);

    // Hand-simulated FIFO schedule: a ends at 10, c starts at 10, ends 15.
    f.sim->tick(9);  // t=10
    CHECK(f.sim->find_job(a)->state == JobState::COMPLETED);
    auto jc = *f.sim->find_job(c);
    CHECK(jc.state == JobState::RUNNING);
    CHECK(jc.start_time == 10);
    f.sim->tick(5);  // t=15
    jc = *f.sim->find_job(c);
    CHECK(jc.state == JobState::COMPLETED);
    CHECK(jc.end_time == 15);
    CHECK(f.sim->find_job(b)->state == JobState::RUNNING);
}

TEST_CASE("squeue and sacct scoping and ordering") {
    SimFixture f;
    auto a1 = f.submit("alice", "#SBATCH --time=00:00:10\nx\n", "/home/alice");
    auto a2 = f.submit("alice", "#SBATCH --time=00:02:00\nx\n", "/home/alice");
    f.submit("bob", "#SBATCH --time=00:02:00\nx\n", "/home/bob");

    f.sim->tick(1);
    auto queue = f.sim->squeue("alice");
    CHECK(queue.size() == 2);
    for (const auto& j : queue) CHECK(j.owner == "alice");

    auto one = f.sim->squeue("alice", a2);
    REQUIRE(one.size() == 1);
    CHECK(one[0].job_id == a2);
    CHECK(f.sim->squeue("alice", 999).empty());

    f.sim->tick(10);  // a1 completes
    queue = f.sim->squeue("alice");
    CHECK(queue.size() == 1);  // terminal jobs drop out of the queue

    auto acct = f.sim->sacct("alice");
    REQUIRE(acct.size() == 2);  // accounting keeps terminal jobs
    CHECK(acct[0].job_id == a1);
    CHECK(acct[1].job_id == a2);
    CHECK(acct[0].state == JobState::COMPLETED);
    CHECK(acct[0].end_time >= acct[0].start_time);

    // squeue results are always a subset of sacct
    for (const auto& q : f.sim->squeue("alice")) {
        bool found = false;
        for (const auto& s : f.sim->sacct("alice")) found |= s.job_id == q.job_id;
        CHECK(found);
    }
}

TEST_CASE("scancel semantics and ownership") {
    SimFixture f(/*slots=*/1);
    auto running = f.submit("alice", "#SBATCH --time=00:01:00\nx\n", "/home/alice");
    auto pending = f.submit("alice", "#SBATCH --time=00:01:00\nx\n", "/home/alice");
    f.sim->tick(5);

    // cancel RUNNING -> CANCELLED with end=now
    f.sim->scancel("alice", running);
    auto jr = *f.sim->find_job(running);
    CHECK(jr.state == JobState::CANCELLED);
    CHECK(jr.end_time == 5);

    // the freed slot dispatches the pending job on the next tick, starting
    // at the instant the slot came free
    f.sim->tick(1);
    auto jp = *f.sim->find_job(pending);
    CHECK(jp.state == JobState::RUNNING);
    CHECK(jp.start_time == 5);

    auto never_ran = f.submit("alice", "#SBATCH --time=00:01:00\nx\n", "/home/alice");
    f.sim->scancel("alice", never_ran);
    auto jn = *f.sim->find_job(never_ran);
    CHECK(jn.state == JobState::CANCELLED);
    CHECK(jn.submit_time <= jn.start_time);
    CHECK(jn.start_time <= jn.end_time);

    // terminal, foreign and unknown jobs all refuse
    CHECK_THROWS_AS(f.sim->scancel("alice", never_ran), ApiError);
    auto bobs = f.submit("bob", "#SBATCH --time=00:01:00\nx\n", "/home/bob");
    CHECK_THROWS_AS(f.sim->scancel("alice", bobs), ApiError);
    CHECK(f.sim->find_job(bobs)->state != JobState::CANCELLED);
    CHECK_THROWS_AS(f.sim->scancel("alice", 424242), ApiError);
}

TEST_CASE("nonzero body exit code fails the job") {
    SimFixture f;
    auto id = f.submit("alice", "#SBATCH --time=00:00:05\nwork\nexit 7\n", "/home/alice");
    f.sim->tick(10);
    auto job = *f.sim->find_job(id);
    CHECK(job.state == JobState::FAILED);
    CHECK(job.exit_code == 7);
}

TEST_CASE("completion callback fires once, outside the lock") {
    SimFixture f;
    auto id = f.submit("alice", "#SBATCH --time=00:00:05\nx\n", "/home/alice");
    int fired = 0;
    JobState seen{};
    f.sim->on_completion(id, [&](const SimJob& j) {
        fired++;
        seen = j.state;
        // Re-entering the scheduler from the callback must not deadlock.
        f.sim->sacct("alice");
    });
    f.sim->tick(100);
    CHECK(fired == 1);
    CHECK(seen == JobState::COMPLETED);

    // Registering after the job is already terminal fires immediately.
    int late = 0;
    f.sim->on_completion(id, [&](const SimJob&) { late++; });
    CHECK(late == 1);
}

TEST_CASE("virtual time never decreases") {
    SimFixture f;
    f.sim->tick(10);
    CHECK_THROWS_AS(f.sim->tick(-1), ApiError);
    CHECK(f.sim->now() == 10);
}

TEST_CASE("determinism: identical inputs give identical traces") {
    auto run_once = [] {
        SimFixture f;
        for (int i = 0; i < 5; ++i) {
            f.submit("alice",
                     "#SBATCH --time=00:00:" + std::string(i % 2 ? "15" : "40") + "\nx\n",
                     "/home/alice");
        }
        f.sim->tick(7);
        f.submit("alice", "#SBATCH --time=00:01:00\nx\n", "/home/alice");
        for (int i = 0; i < 20; ++i) f.sim->tick(11);
        std::string out;
        for (const auto& line : f.sim->trace()) out += line + "\n";
        return out;
    };
    CHECK(run_once() == run_once());
}

TEST_CASE("conservation: every submitted job is accounted exactly once") {
    SimFixture f;
    int submitted = 0;
    for (int i = 0; i < 6; ++i) {
        f.submit("alice", "#SBATCH --time=00:00:10\nx\n", "/home/alice");
        ++submitted;
    }
    f.sim->tick(17);
    f.sim->scancel("alice", 6);
    f.sim->tick(500);
    auto acct = f.sim->sacct("alice");
    CHECK(static_cast<int>(acct.size()) == submitted);
    for (const auto& j : acct) {
        bool terminal = j.state == JobState::COMPLETED || j.state == JobState::CANCELLED ||
                        j.state == JobState::FAILED;
        CHECK(terminal);
    }
}

TEST_SUITE_END();

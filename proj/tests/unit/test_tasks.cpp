#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include "firecrest/tasks/task_store.hpp"
#include "firecrest/util/errors.hpp"
#include "support/harness.hpp"

using namespace firecrest;
using namespace firecrest::tasks;
using test_support::TestClock;

TEST_SUITE_BEGIN("tasks");

TEST_CASE("create produces NEW tasks with unique ids, immediately readable") {
    TestClock clock;
    TaskStore store(clock.fn());
    auto t1 = store.create("alice", "compute", "job submission");
    auto t2 = store.create("alice", "compute", "job submission");
    CHECK(t1.status == TaskStatus::NEW);
    CHECK(t1.owner == "alice");
    CHECK(t1.task_id != t2.task_id);

    // Write-then-read: every field survives the store boundary.
    auto read = store.get("alice", t1.task_id);
    CHECK(read.task_id == t1.task_id);
    CHECK(read.hash_id == t1.hash_id);
    CHECK(read.owner == t1.owner);
    CHECK(read.service == t1.service);
    CHECK(read.description == t1.description);
    CHECK(read.created_at == t1.created_at);
    CHECK(read.status == t1.status);
}

TEST_CASE("state machine: legal and illegal transitions") {
    CHECK(transition_legal(TaskStatus::NEW, TaskStatus::PROGRESS));
    CHECK(transition_legal(TaskStatus::NEW, TaskStatus::ERROR));
    CHECK(transition_legal(TaskStatus::PROGRESS, TaskStatus::PROGRESS));
    CHECK(transition_legal(TaskStatus::PROGRESS, TaskStatus::WAITING_FOR_USER));
    CHECK(transition_legal(TaskStatus::WAITING_FOR_USER, TaskStatus::PROGRESS));
    CHECK(transition_legal(TaskStatus::PROGRESS, TaskStatus::SUCCESS));
    CHECK(transition_legal(TaskStatus::PROGRESS, TaskStatus::ERROR));
    CHECK(transition_legal(TaskStatus::WAITING_FOR_USER, TaskStatus::ERROR));

    CHECK(!transition_legal(TaskStatus::NEW, TaskStatus::SUCCESS));
    CHECK(!transition_legal(TaskStatus::NEW, TaskStatus::WAITING_FOR_USER));
    CHECK(!transition_legal(TaskStatus::SUCCESS, TaskStatus::PROGRESS));
    CHECK(!transition_legal(TaskStatus::ERROR, TaskStatus::PROGRESS));
    CHECK(!transition_legal(TaskStatus::WAITING_FOR_USER, TaskStatus::SUCCESS));

    TestClock clock;
    TaskStore store(clock.fn());
    auto t = store.create("alice", "compute", "x");
    CHECK(store.update(t.task_id, TaskStatus::PROGRESS, {{"job_id", 1}}).status ==
          TaskStatus::PROGRESS);
    store.update(t.task_id, TaskStatus::SUCCESS, {});
    CHECK_THROWS_AS(store.update(t.task_id, TaskStatus::PROGRESS, {}), ApiError);
    CHECK_THROWS_AS(store.update("nonexistent", TaskStatus::PROGRESS, {}), ApiError);
}

TEST_CASE("ownership isolation: foreign and unknown ids read as 404") {
    TestClock clock;
    TaskStore store(clock.fn());
    auto t = store.create("alice", "storage", "upload");

    CHECK_THROWS_AS(store.get("bob", t.task_id), ApiError);
    CHECK_THROWS_AS(store.get("alice", "nope"), ApiError);
    CHECK(store.list("bob").empty());

    // bob cannot delete alice's task, and it survives the attempt
    CHECK_THROWS_AS(store.remove("bob", t.task_id), ApiError);
    CHECK(store.get("alice", t.task_id).task_id == t.task_id);
}

TEST_CASE("list returns own tasks newest first") {
    TestClock clock;
    TaskStore store(clock.fn());
    CHECK(store.list("alice").empty());
    auto t1 = store.create("alice", "compute", "first");
    auto t2 = store.create("alice", "compute", "second");
    auto t3 = store.create("alice", "compute", "third");
    store.create("bob", "compute", "not alice's");

    auto mine = store.list("alice");
    REQUIRE(mine.size() == 3);
    CHECK(mine[0].task_id == t3.task_id);
    CHECK(mine[1].task_id == t2.task_id);
    CHECK(mine[2].task_id == t1.task_id);
}

TEST_CASE("delete semantics") {
    TestClock clock;
    TaskStore store(clock.fn());
    auto t = store.create("alice", "compute", "x");
    store.remove("alice", t.task_id);
    CHECK_THROWS_AS(store.get("alice", t.task_id), ApiError);
    CHECK_THROWS_AS(store.remove("alice", t.task_id), ApiError);  // second delete is 404
}

TEST_CASE("updated_at is monotonic per task") {
    TestClock clock;
    TaskStore store(clock.fn());
    auto t = store.create("alice", "compute", "x");
    auto before = t.updated_at;
    clock.advance(5);
    auto updated = store.update(t.task_id, TaskStatus::PROGRESS, {});
    CHECK(updated.updated_at >= before);
    auto later = store.update(t.task_id, TaskStatus::PROGRESS, {});
    CHECK(later.updated_at >= updated.updated_at);
}

TEST_CASE("interleaved concurrent updates stay legal and converge") {
    TestClock clock;
    TaskStore store(clock.fn());
    auto t = store.create("alice", "compute", "hammered");
    store.update(t.task_id, TaskStatus::PROGRESS, {{"value", -1}});

    constexpr int kThreads = 4;
    constexpr int kPerThread = 25;
    std::vector<std::thread> threads;
    for (int i = 0; i < kThreads; ++i) {
        threads.emplace_back([&store, &t, i] {
            for (int j = 0; j < kPerThread; ++j) {
                store.update(t.task_id, TaskStatus::PROGRESS,
                             {{"value", i * kPerThread + j}});
            }
        });
    }
    // Concurrent readers must always observe a legal state.
    std::atomic<bool> done{false};
    std::thread reader([&] {
        while (!done.load()) {
            auto snap = store.get("alice", t.task_id);
            CHECK(snap.status == TaskStatus::PROGRESS);
        }
    });
    for (auto& th : threads) th.join();
    done = true;
    reader.join();

    auto final = store.get("alice", t.task_id);
    int v = final.data.at("value").get<int>();
    CHECK(v >= 0);
    CHECK(v < kThreads * kPerThread);

    // Transition-log oracle: exactly the submitted transitions, all legal.
    auto log = store.transition_log();
    CHECK(log.size() == 1 + kThreads * kPerThread);
    for (const auto& tr : log) CHECK(transition_legal(tr.from, tr.to));
}

TEST_CASE("snapshot persistence round trips across a restart") {
    TestClock clock;
    test_support::TempDir dir;
    auto path = (dir.path() / "tasks.json").string();
    {
        TaskStore store(clock.fn());
        auto t1 = store.create("alice", "compute", "persisted");
        store.update(t1.task_id, TaskStatus::PROGRESS, {{"job_id", 7}});
        store.create("bob", "storage", "bob's");
        store.save_snapshot(path);
    }
    TaskStore reloaded(clock.fn());
    reloaded.load_snapshot(path);
    CHECK(reloaded.size() == 2);
    auto mine = reloaded.list("alice");
    REQUIRE(mine.size() == 1);
    CHECK(mine[0].description == "persisted");
    CHECK(mine[0].status == TaskStatus::PROGRESS);
    CHECK(mine[0].data.at("job_id") == 7);
}

TEST_SUITE_END();

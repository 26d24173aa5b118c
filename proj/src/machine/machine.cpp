#include "firecrest/machine/machine.hpp"

#include <charconv>

#include "firecrest/util/errors.hpp"
#include "firecrest/util/shellwords.hpp"

namespace firecrest::machine {

using delegation::ExecutionResult;

SandboxExecutor::SandboxExecutor(SandboxFs& fs, scheduler::SchedulerSim& sched)
    : fs_(fs), sched_(sched) {}

namespace {

std::optional<std::int64_t> parse_int(const std::string& s) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

ExecutionResult usage_error(const std::string& msg) {
    ExecutionResult r;
    r.exit_code = 2;
    r.error = msg;
    r.http_status = 400;
    r.error_id = "bad_command";
    return r;
}

std::string basename_of(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

std::string dirname_of(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos || pos == 0 ? "/" : path.substr(0, pos);
}

}  // namespace

ExecutionResult SandboxExecutor::execute(const std::string& principal,
                                         const std::string& command,
                                         const std::string& input) {
    auto args_opt = shellwords::split(command);
    if (!args_opt || args_opt->empty()) return usage_error("empty or unparsable command");
    const auto& args = *args_opt;
    const std::string& verb = args[0];

    try {
        if (verb == "ls" && args.size() == 2) {
            auto entries = fs_.list_dir(principal, args[1]);
            nlohmann::json j = nlohmann::json::array();
            for (const auto& e : entries) j.push_back(e.to_json());
            return {0, j.dump(), "", 0, ""};
        }
        if (verb == "file" && args.size() == 2) {
            return {0, fs_.file_type(principal, args[1]), "", 0, ""};
        }
        if (verb == "mkdir" && (args.size() == 2 || (args.size() == 3 && args[1] == "-p"))) {
            bool parents = args.size() == 3;
            fs_.mkdir(principal, args.back(), parents);
            return {0, "", "", 0, ""};
        }
        if (verb == "mv" && args.size() == 3) {
            fs_.rename(principal, args[1], args[2]);
            return {0, "", "", 0, ""};
        }
        if (verb == "chmod" && args.size() == 3) {
            fs_.chmod(principal, args[2], args[1]);
            return {0, "", "", 0, ""};
        }
        if (verb == "chown" && args.size() == 3) {
            // owner spec: "owner", "owner:group" or ":group"
            const std::string& spec = args[1];
            auto colon = spec.find(':');
            std::optional<std::string> owner, group;
            if (colon == std::string::npos) {
                owner = spec;
            } else {
                if (colon > 0) owner = spec.substr(0, colon);
                if (colon + 1 < spec.size()) group = spec.substr(colon + 1);
            }
            fs_.chown(principal, args[2], owner, group);
            return {0, "", "", 0, ""};
        }
        if (verb == "ln" && args.size() == 4 && args[1] == "-s") {
            fs_.symlink(principal, args[2], args[3]);
            return {0, "", "", 0, ""};
        }
        if (verb == "put" && (args.size() == 2 || (args.size() == 3 && args[1] == "-p"))) {
            fs_.write_file(principal, args.back(), input, args.size() == 3);
            return {0, "", "", 0, ""};
        }
        if (verb == "get" && args.size() == 2) {
            return {0, fs_.read_file(principal, args[1]), "", 0, ""};
        }
        if (verb == "rm" && args.size() == 3 && args[1] == "-r") {
            fs_.remove_recursive(principal, args[2]);
            return {0, "", "", 0, ""};
        }
        if (verb == "rsync" && args.size() == 3) {
            fs_.copy_recursive(principal, args[1], args[2]);
            return {0, "", "", 0, ""};
        }
        if (verb == "sbatch" && args.size() == 2) {
            std::string text = fs_.read_file(principal, args[1]);
            scheduler::ParseError perr;
            auto script = scheduler::parse_sbatch_script(text, perr);
            if (!script) {
                return {1, "", perr.message, 400, "sbatch_error"};
            }
            auto id = sched_.submit(principal, *script, dirname_of(args[1]),
                                    basename_of(args[1]));
            return {0, "Submitted batch job " + std::to_string(id) + "\n", "", 0, ""};
        }
        if (verb == "squeue") {
            // squeue --json -u <user> [-j <id>]
            std::optional<std::string> user;
            std::optional<std::int64_t> job_id;
            for (std::size_t i = 1; i < args.size(); ++i) {
                if (args[i] == "--json") continue;
                if (args[i] == "-u" && i + 1 < args.size()) user = args[++i];
                else if (args[i] == "-j" && i + 1 < args.size()) {
                    job_id = parse_int(args[++i]);
                    if (!job_id) return usage_error("squeue: invalid job id");
                } else return usage_error("squeue: unknown argument " + args[i]);
            }
            if (!user || *user != principal) {
                return {1, "", "squeue: can only query own jobs", 403, "forbidden"};
            }
            nlohmann::json j = nlohmann::json::array();
            for (const auto& job : sched_.squeue(principal, job_id)) j.push_back(job.to_json());
            return {0, j.dump(), "", 0, ""};
        }
        if (verb == "sacct") {
            std::optional<std::string> user;
            for (std::size_t i = 1; i < args.size(); ++i) {
                if (args[i] == "--json") continue;
                if (args[i] == "-u" && i + 1 < args.size()) user = args[++i];
                else return usage_error("sacct: unknown argument " + args[i]);
            }
            if (!user || *user != principal) {
                return {1, "", "sacct: can only query own jobs", 403, "forbidden"};
            }
            nlohmann::json j = nlohmann::json::array();
            for (const auto& job : sched_.sacct(principal)) j.push_back(job.to_json());
            return {0, j.dump(), "", 0, ""};
        }
        if (verb == "scancel" && args.size() == 2) {
            auto id = parse_int(args[1]);
            if (!id) return usage_error("scancel: invalid job id");
            sched_.scancel(principal, *id);
            return {0, "", "", 0, ""};
        }
    } catch (const ApiError& e) {
        return {1, "", e.what(), e.status(), e.error_id()};
    }
    return usage_error("unknown command: " + verb);
}

Machine::Machine(const MachineConfig& config, const std::filesystem::path& root,
                 std::set<std::string> users, ClockFn wall_source)
    : config_(config),
      fs_(root, users),
      sched_(config, fs_, std::move(wall_source)),
      exec_(fs_, sched_) {
    for (const auto& user : users) fs_.ensure_user_home(user);
}

void MachineRegistry::add(std::unique_ptr<Machine> machine) {
    machines_.push_back(std::move(machine));
}

Machine& MachineRegistry::require(const std::string& name) const {
    for (const auto& m : machines_) {
        if (m->name() == name) return *m;
    }
    throw ApiError(400, "unknown_machine", "machine is not configured: " + name);
}

std::vector<std::string> MachineRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& m : machines_) out.push_back(m->name());
    return out;
}

std::vector<Machine*> MachineRegistry::all() const {
    std::vector<Machine*> out;
    for (const auto& m : machines_) out.push_back(m.get());
    return out;
}

}  // namespace firecrest::machine

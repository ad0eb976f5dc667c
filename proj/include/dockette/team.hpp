#pragma once

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace dockette {

enum class Strategy {
    WorkShare,    // fork-join loops over index ranges, implicit join at each loop end
    ExplicitTeam, // fixed team of workers running one kernel, explicit barriers between phases
};

inline std::string_view to_string(Strategy s) noexcept { return s == Strategy::WorkShare ? "workshare" : "explicit"; }

inline Strategy parse_strategy(std::string_view text) {
    if (text == "workshare") return Strategy::WorkShare;
    if (text == "explicit") return Strategy::ExplicitTeam;
    throw std::invalid_argument("unknown strategy '" + std::string(text) + "' (expected workshare or explicit)");
}

struct BackendConfig {
    Strategy strategy = Strategy::WorkShare;
    std::size_t team_size = 64;        // logical workers per run
    std::size_t max_parallel_runs = 1;
    std::size_t max_threads = 0;       // 0: DOCKETTE_THREADS, else logical cores

    void validate() const {
        if (team_size < 1) throw std::invalid_argument("team_size must be at least 1");
        if (max_parallel_runs < 1) throw std::invalid_argument("max_parallel_runs must be at least 1");
    }
};

/// Total OS threads the engine may use.
inline std::size_t thread_budget(const BackendConfig& cfg) {
    if (cfg.max_threads > 0) return cfg.max_threads;
    if (const char* env = std::getenv("DOCKETTE_THREADS")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// OS threads backing one team when `concurrent_runs` teams share the budget.
/// Logical lanes beyond this width are multiplexed onto the same threads.
inline std::size_t physical_width(std::size_t team_size, std::size_t budget, std::size_t concurrent_runs) {
    const std::size_t share = std::max<std::size_t>(1, budget / std::max<std::size_t>(1, concurrent_runs));
    return std::clamp<std::size_t>(std::min(team_size, share), 1, team_size);
}

// ---------------------------------------------------------------------------

/// Fork-join pool. `run_lanes` hands lane indices to whichever thread is free
/// (the caller participates) and returns once every lane has finished.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t width) : width_(std::max<std::size_t>(1, width)) {
        for (std::size_t t = 1; t < width_; ++t) threads_.emplace_back([this] { worker_loop(); });
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    ~WorkerPool() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        start_cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    std::size_t width() const noexcept { return width_; }

    void run_lanes(std::size_t lanes, const std::function<void(std::size_t)>& fn) {
        if (lanes == 0) return;
        if (threads_.empty()) {
            for (std::size_t l = 0; l < lanes; ++l) fn(l);
            return;
        }
        {
            std::lock_guard lock(mutex_);
            job_ = &fn;
            lanes_ = lanes;
            next_.store(0, std::memory_order_relaxed);
            pending_ = threads_.size();
            error_ = nullptr;
            ++epoch_;
        }
        start_cv_.notify_all();
        drain();
        std::unique_lock lock(mutex_);
        done_cv_.wait(lock, [&] { return pending_ == 0; });
        job_ = nullptr;
        if (error_) std::rethrow_exception(error_);
    }

private:
    void drain() {
        for (;;) {
            const std::size_t l = next_.fetch_add(1, std::memory_order_relaxed);
            if (l >= lanes_) return;
            try {
                (*job_)(l);
            } catch (...) {
                std::lock_guard lock(mutex_);
                if (!error_) error_ = std::current_exception();
            }
        }
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            {
                std::unique_lock lock(mutex_);
                start_cv_.wait(lock, [&] { return stop_ || epoch_ != seen; });
                if (stop_) return;
                seen = epoch_;
            }
            drain();
            {
                std::lock_guard lock(mutex_);
                if (--pending_ == 0) done_cv_.notify_one();
            }
        }
    }

    std::size_t width_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable start_cv_;
    std::condition_variable done_cv_;
    const std::function<void(std::size_t)>* job_ = nullptr;
    std::size_t lanes_ = 0;
    std::atomic<std::size_t> next_{0};
    std::size_t pending_ = 0;
    std::uint64_t epoch_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

// ---------------------------------------------------------------------------

class Team;

/// One worker's view of a running team kernel.
class TeamMember {
public:
    std::size_t rank() const noexcept { return rank_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t team_size() const noexcept { return team_size_; }
    bool leader() const noexcept { return rank_ == 0; }

    void barrier() { barrier_->arrive_and_wait(); }

    /// Units i in [0, n) owned by this worker: lane = i mod team_size, and
    /// this worker runs lanes rank, rank + width, ...
    template <class F>
    void for_units(std::size_t n, F&& f) const {
        for (std::size_t lane = rank_; lane < team_size_; lane += width_)
            for (std::size_t i = lane; i < n; i += team_size_) f(i, lane);
    }

private:
    friend class Team;
    TeamMember(std::size_t rank, std::size_t width, std::size_t team_size, std::barrier<>* b)
        : rank_(rank), width_(width), team_size_(team_size), barrier_(b) {}

    std::size_t rank_;
    std::size_t width_;
    std::size_t team_size_;
    std::barrier<>* barrier_;
};

/// Fixed set of `width` threads (rank 0 is the caller) that all execute the
/// same kernel, coordinating through `TeamMember::barrier()`.
class Team {
public:
    Team(std::size_t width, std::size_t team_size)
        : width_(std::clamp<std::size_t>(width, 1, std::max<std::size_t>(1, team_size))), team_size_(std::max<std::size_t>(1, team_size)) {
        for (std::size_t r = 1; r < width_; ++r) threads_.emplace_back([this, r] { worker_loop(r); });
    }

    Team(const Team&) = delete;
    Team& operator=(const Team&) = delete;

    ~Team() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        start_cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t team_size() const noexcept { return team_size_; }

    void run(const std::function<void(TeamMember&)>& kernel) {
        barrier_ = std::make_unique<std::barrier<>>(static_cast<std::ptrdiff_t>(width_));
        {
            std::lock_guard lock(mutex_);
            kernel_ = &kernel;
            pending_ = threads_.size();
            error_ = nullptr;
            ++epoch_;
        }
        start_cv_.notify_all();
        execute(0);
        std::unique_lock lock(mutex_);
        done_cv_.wait(lock, [&] { return pending_ == 0; });
        kernel_ = nullptr;
        if (error_) std::rethrow_exception(error_);
    }

private:
    void execute(std::size_t rank) {
        TeamMember member(rank, width_, team_size_, barrier_.get());
        try {
            (*kernel_)(member);
        } catch (...) {
            {
                std::lock_guard lock(mutex_);
                if (!error_) error_ = std::current_exception();
            }
            // Leave the barrier so the remaining workers are not stranded.
            barrier_->arrive_and_drop();
        }
    }

    void worker_loop(std::size_t rank) {
        std::uint64_t seen = 0;
        for (;;) {
            {
                std::unique_lock lock(mutex_);
                start_cv_.wait(lock, [&] { return stop_ || epoch_ != seen; });
                if (stop_) return;
                seen = epoch_;
            }
            execute(rank);
            {
                std::lock_guard lock(mutex_);
                if (--pending_ == 0) done_cv_.notify_one();
            }
        }
    }

    std::size_t width_;
    std::size_t team_size_;
    std::vector<std::thread> threads_;
    std::unique_ptr<std::barrier<>> barrier_;
    std::mutex mutex_;
    std::condition_variable start_cv_;
    std::condition_variable done_cv_;
    const std::function<void(TeamMember&)>* kernel_ = nullptr;
    std::size_t pending_ = 0;
    std::uint64_t epoch_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

// ---------------------------------------------------------------------------
// Schedules: the two strategies behind one phase vocabulary.
//
// A driver is written once against `parallel` / `single` and runs under
// either schedule. Under WorkShare it runs on the calling thread only; under
// ExplicitTeam every team member runs it, so driver-local control flow may
// depend only on shared state read after a phase has completed.

enum class KernelClass { PoseScore, GeneticOps, LocalSearch, Reduction };

struct KernelTimings {
    double pose_score = 0.0;
    double ga = 0.0;
    double local_search = 0.0;
    double reduction = 0.0;

    double& operator[](KernelClass k) noexcept {
        switch (k) {
        case KernelClass::PoseScore: return pose_score;
        case KernelClass::GeneticOps: return ga;
        case KernelClass::LocalSearch: return local_search;
        default: return reduction;
        }
    }
    KernelTimings& operator+=(const KernelTimings& o) noexcept {
        pose_score += o.pose_score;
        ga += o.ga;
        local_search += o.local_search;
        reduction += o.reduction;
        return *this;
    }
    double total() const noexcept { return pose_score + ga + local_search + reduction; }
};

namespace detail {

class PhaseClock {
public:
    PhaseClock(KernelTimings* sink, KernelClass k, bool active) : sink_(active ? sink : nullptr), kind_(k) {
        if (sink_) start_ = std::chrono::steady_clock::now();
    }
    ~PhaseClock() {
        if (sink_) (*sink_)[kind_] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    PhaseClock(const PhaseClock&) = delete;
    PhaseClock& operator=(const PhaseClock&) = delete;

private:
    KernelTimings* sink_;
    KernelClass kind_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

/// Contiguous index ranges per lane on a fork-join pool.
class WorkShareSchedule {
public:
    WorkShareSchedule(WorkerPool& pool, std::size_t team_size, KernelTimings* timings = nullptr)
        : pool_(&pool), team_size_(team_size), timings_(timings) {}

    std::size_t team_size() const noexcept { return team_size_; }
    bool leader() const noexcept { return true; }

    /// f(i, lane) for all i in [0, n); returns after the implicit join.
    template <class F>
    void parallel(KernelClass k, std::size_t n, F&& f) {
        detail::PhaseClock clock(timings_, k, true);
        const std::size_t lanes = std::min(team_size_, n);
        pool_->run_lanes(lanes, [&](std::size_t lane) {
            const std::size_t begin = lane * n / lanes;
            const std::size_t end = (lane + 1) * n / lanes;
            for (std::size_t i = begin; i < end; ++i) f(i, lane);
        });
    }

    template <class F>
    void single(KernelClass k, F&& f) {
        detail::PhaseClock clock(timings_, k, true);
        f();
    }

private:
    WorkerPool* pool_;
    std::size_t team_size_;
    KernelTimings* timings_;
};

/// Strided ownership from (worker index, team size) with a barrier closing
/// every phase. Only the leader records timings.
class TeamSchedule {
public:
    explicit TeamSchedule(TeamMember& member, KernelTimings* timings = nullptr) : member_(&member), timings_(timings) {}

    std::size_t team_size() const noexcept { return member_->team_size(); }
    bool leader() const noexcept { return member_->leader(); }
    TeamMember& member() noexcept { return *member_; }

    template <class F>
    void parallel(KernelClass k, std::size_t n, F&& f) {
        detail::PhaseClock clock(timings_, k, member_->leader());
        member_->for_units(n, f);
        member_->barrier();
    }

    template <class F>
    void single(KernelClass k, F&& f) {
        detail::PhaseClock clock(timings_, k, member_->leader());
        if (member_->leader()) f();
        member_->barrier();
    }

private:
    TeamMember* member_;
    KernelTimings* timings_;
};

/// Runs `driver(schedule)` under the configured strategy with `width` OS
/// threads. Under ExplicitTeam the driver runs once per team member.
template <class Driver>
void with_schedule(Strategy strategy, std::size_t team_size, std::size_t width, KernelTimings* timings, Driver&& driver) {
    if (strategy == Strategy::WorkShare) {
        WorkerPool pool(std::min(width, team_size));
        WorkShareSchedule sched(pool, team_size, timings);
        driver(sched);
    } else {
        Team team(width, team_size);
        team.run([&](TeamMember& member) {
            TeamSchedule sched(member, timings);
            driver(sched);
        });
    }
}

} // namespace dockette

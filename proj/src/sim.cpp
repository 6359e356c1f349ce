#include "searchcap/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <queue>
#include <random>

#include <boost/math/distributions/students_t.hpp>

namespace searchcap {

void SimConfig::validate() const {
    if (p < 1) throw ConfigError("sim: p must be >= 1");
    if (lambda < 0) throw ConfigError("sim: lambda must be >= 0");
    if (s_server_mean < 0 || s_broker_mean < 0)
        throw ConfigError("sim: service means must be >= 0");
    if (two_class) two_class->validate();
    if (horizon < 1) throw ConfigError("sim: horizon must be >= 1");
    if (warmup_fraction < 0 || warmup_fraction >= 1)
        throw ConfigError("sim: warmup fraction must be in [0, 1)");
    if (batches < 2) throw ConfigError("sim: need at least 2 batches");
}

namespace {

// Seed expander for independent substreams (one per server plus the
// arrival, broker, and shared-draw streams). Standard mixing constants.
std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// mt19937_64 with explicit output transforms. The standard library's
// distribution objects are not pinned across implementations; these
// are, so a seed means the same sample path everywhere.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : rng_(seed) {}

    double uniform01() {  // [0, 1), 53-bit resolution
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

    double exponential(double mean) {
        return mean <= 0.0 ? 0.0 : -mean * std::log1p(-uniform01());
    }

    bool coin(double prob) { return uniform01() < prob; }

private:
    std::mt19937_64 rng_;
};

struct Event {
    double t = 0;
    std::uint64_t seq = 0;  // tie-break so heap order is reproducible
    enum Kind : std::uint8_t { Arrival, ServerDone, BrokerDone } kind = Arrival;
    int server = -1;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

struct ServerTask {
    std::uint64_t query = 0;
    double service = 0;
};

struct ServerState {
    std::deque<ServerTask> queue;
    ServerTask current;
    bool busy = false;
    double busy_since = 0;
    double busy_accum = 0;

    double busy_through(double t) const {
        return busy_accum + (busy ? t - busy_since : 0.0);
    }
};

class Simulation {
public:
    Simulation(const SimConfig& cfg, bool two_class,
               const std::vector<double>* trace)
        : cfg_(cfg), two_class_(two_class), trace_(trace) {
        std::uint64_t root = cfg.seed;
        arrivals_rng_.emplace(splitmix64(root));
        broker_rng_.emplace(splitmix64(root));
        shared_rng_.emplace(splitmix64(root));
        servers_rng_.reserve(cfg.p);
        for (int i = 0; i < cfg.p; ++i) servers_rng_.emplace_back(splitmix64(root));
        servers_.resize(cfg.p);
    }

    SimResult run();

private:
    void on_arrival(double t);
    void on_server_done(double t, int server);
    void on_broker_done(double t);
    void start_server(int i, double t);
    void start_broker(double t);
    void complete(double t, std::uint64_t query);
    void schedule(double t, Event::Kind kind, int server = -1);
    void schedule_next_arrival(double now);
    void note_population(double t);
    void snapshot(double t, double* busy_out, double* integral_out) const;
    double draw_service(int server);

    const SimConfig& cfg_;
    bool two_class_;
    const std::vector<double>* trace_;

    std::optional<Stream> arrivals_rng_, broker_rng_, shared_rng_;
    std::vector<Stream> servers_rng_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    std::uint64_t seq_ = 0;

    std::vector<ServerState> servers_;
    std::vector<double> arrival_time_;
    std::vector<int> remaining_;

    std::deque<std::uint64_t> broker_queue_;
    std::uint64_t broker_current_ = 0;
    bool broker_busy_ = false;

    std::size_t next_trace_ = 0;

    // Per-query service draw shared by all siblings in Identical mode.
    double query_shared_service_ = 0;

    std::uint64_t target_ = 0;
    std::uint64_t warmup_count_ = 0;
    std::uint64_t completions_ = 0;
    std::vector<double> responses_;  // post-warmup, in completion order

    double n_integral_ = 0;   // integral of in-system count over time
    double last_event_t_ = 0;
    std::uint64_t in_system_ = 0;

    double window_start_t_ = 0, window_end_t_ = 0;
    double busy_at_start_ = 0, busy_at_end_ = 0;
    double integral_at_start_ = 0, integral_at_end_ = 0;
    bool stop_ = false;
};

void Simulation::schedule(double t, Event::Kind kind, int server) {
    events_.push(Event{t, seq_++, kind, server});
}

void Simulation::schedule_next_arrival(double now) {
    if (trace_) {
        if (next_trace_ < trace_->size()) schedule((*trace_)[next_trace_], Event::Arrival);
    } else {
        schedule(now + arrivals_rng_->exponential(1.0 / cfg_.lambda), Event::Arrival);
    }
}

void Simulation::note_population(double t) {
    n_integral_ += static_cast<double>(in_system_) * (t - last_event_t_);
    last_event_t_ = t;
}

void Simulation::snapshot(double t, double* busy_out, double* integral_out) const {
    double busy = 0;
    for (const auto& s : servers_) busy += s.busy_through(t);
    *busy_out = busy;
    *integral_out = n_integral_;
}

double Simulation::draw_service(int server) {
    if (!two_class_) {
        if (cfg_.mode == CorrelationMode::Identical) return query_shared_service_;
        return servers_rng_[server].exponential(cfg_.s_server_mean);
    }
    const ServiceParams& c = *cfg_.two_class;
    if (cfg_.mode == CorrelationMode::Identical) return query_shared_service_;
    const bool hit = servers_rng_[server].coin(c.hit);
    const double mean = hit ? c.s_hit : c.s_miss + c.s_disk;
    return servers_rng_[server].exponential(mean);
}

void Simulation::on_arrival(double t) {
    const std::uint64_t q = arrival_time_.size();
    arrival_time_.push_back(t);
    remaining_.push_back(cfg_.p);
    ++in_system_;

    if (cfg_.mode == CorrelationMode::Identical) {
        if (two_class_) {
            const ServiceParams& c = *cfg_.two_class;
            const bool hit = shared_rng_->coin(c.hit);
            const double mean = hit ? c.s_hit : c.s_miss + c.s_disk;
            query_shared_service_ = shared_rng_->exponential(mean);
        } else {
            query_shared_service_ = shared_rng_->exponential(cfg_.s_server_mean);
        }
    }

    for (int i = 0; i < cfg_.p; ++i) {
        servers_[i].queue.push_back(ServerTask{q, draw_service(i)});
        if (!servers_[i].busy) start_server(i, t);
    }

    ++next_trace_;
    schedule_next_arrival(t);
}

void Simulation::start_server(int i, double t) {
    ServerState& s = servers_[i];
    s.current = s.queue.front();
    s.queue.pop_front();
    s.busy = true;
    s.busy_since = t;
    schedule(t + s.current.service, Event::ServerDone, i);
}

void Simulation::on_server_done(double t, int server) {
    ServerState& s = servers_[server];
    s.busy_accum += t - s.busy_since;
    s.busy = false;

    const std::uint64_t q = s.current.query;
    if (--remaining_[q] == 0) {
        broker_queue_.push_back(q);
        if (!broker_busy_) start_broker(t);
    }
    if (!s.queue.empty()) start_server(server, t);
}

void Simulation::start_broker(double t) {
    broker_current_ = broker_queue_.front();
    broker_queue_.pop_front();
    broker_busy_ = true;
    schedule(t + broker_rng_->exponential(cfg_.s_broker_mean), Event::BrokerDone);
}

void Simulation::on_broker_done(double t) {
    broker_busy_ = false;
    complete(t, broker_current_);
    --in_system_;
    if (!stop_ && !broker_queue_.empty()) start_broker(t);
}

void Simulation::complete(double t, std::uint64_t query) {
    ++completions_;
    if (completions_ == warmup_count_) {
        snapshot(t, &busy_at_start_, &integral_at_start_);
        window_start_t_ = t;
    }
    if (completions_ > warmup_count_)
        responses_.push_back(t - arrival_time_[query]);
    if (completions_ == target_) {
        snapshot(t, &busy_at_end_, &integral_at_end_);
        window_end_t_ = t;
        stop_ = true;
    }
}

SimResult Simulation::run() {
    target_ = trace_ ? std::min<std::uint64_t>(cfg_.horizon, trace_->size())
                     : cfg_.horizon;

    SimResult result;
    const double s_mean =
        two_class_ ? service_time_server(*cfg_.two_class) : cfg_.s_server_mean;
    if (!trace_ &&
        (cfg_.lambda * s_mean >= 1.0 || cfg_.lambda * cfg_.s_broker_mean >= 1.0))
        result.saturated_warning = true;

    if (target_ == 0) return result;

    warmup_count_ = static_cast<std::uint64_t>(
        cfg_.warmup_fraction * static_cast<double>(target_));
    responses_.reserve(target_ - warmup_count_);

    if (trace_ && !trace_->empty() && (*trace_)[0] < 0)
        throw ConfigError("sim: trace instants must be >= 0");

    schedule_next_arrival(0.0);

    while (!events_.empty() && !stop_) {
        const Event ev = events_.top();
        events_.pop();
        note_population(ev.t);
        switch (ev.kind) {
            case Event::Arrival: on_arrival(ev.t); break;
            case Event::ServerDone: on_server_done(ev.t, ev.server); break;
            case Event::BrokerDone: on_broker_done(ev.t); break;
        }
    }

    result.completed = completions_;
    if (responses_.empty()) return result;

    double sum = 0;
    for (double r : responses_) sum += r;
    const auto m = static_cast<double>(responses_.size());
    result.mean_response = sum / m;

    // Batch-means confidence interval. Batches of equal size; a short
    // run falls back to fewer batches, and below two we report no CI.
    const auto batches = std::min<std::size_t>(cfg_.batches, responses_.size());
    if (batches >= 2) {
        const std::size_t per = responses_.size() / batches;
        std::vector<double> means(batches, 0.0);
        for (std::size_t b = 0; b < batches; ++b) {
            double bs = 0;
            for (std::size_t i = b * per; i < (b + 1) * per; ++i)
                bs += responses_[i];
            means[b] = bs / static_cast<double>(per);
        }
        double bm = 0;
        for (double v : means) bm += v;
        bm /= static_cast<double>(batches);
        double var = 0;
        for (double v : means) var += (v - bm) * (v - bm);
        var /= static_cast<double>(batches - 1);
        const boost::math::students_t_distribution<double> dist(
            static_cast<double>(batches - 1));
        const double tq = boost::math::quantile(dist, 0.975);
        result.ci_halfwidth = tq * std::sqrt(var / static_cast<double>(batches));
    }

    const double window = window_end_t_ - window_start_t_;
    if (window > 0) {
        const double busy = busy_at_end_ - busy_at_start_;
        result.utilization = std::clamp(
            busy / (window * static_cast<double>(cfg_.p)), 0.0, 1.0);
        result.mean_in_system = (integral_at_end_ - integral_at_start_) / window;
        result.throughput = m / window;
    }
    return result;
}

}  // namespace

SimResult run(const SimConfig& config) {
    config.validate();
    if (config.s_server_mean <= 0)
        throw ConfigError("sim: single-class run needs s_server_mean > 0");
    Simulation sim(config, false, nullptr);
    return sim.run();
}

SimResult run_two_class(const SimConfig& config) {
    config.validate();
    if (!config.two_class)
        throw ConfigError("sim: two-class run needs full service params");
    Simulation sim(config, true, nullptr);
    return sim.run();
}

SimResult run_trace(const SimConfig& config, const std::vector<double>& arrivals) {
    config.validate();
    if (!std::is_sorted(arrivals.begin(), arrivals.end()))
        throw ConfigError("sim: trace must be sorted by arrival instant");
    Simulation sim(config, config.two_class.has_value(), &arrivals);
    return sim.run();
}

}  // namespace searchcap

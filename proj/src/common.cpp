#include "tlnum/common.hpp"
#include "tlnum/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace tln {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidDomain: return "invalid-domain";
    case ErrorKind::InfeasibleConstant: return "infeasible-constant";
    case ErrorKind::Lookup: return "lookup";
    case ErrorKind::Capability: return "capability";
    case ErrorKind::IncompleteInput: return "incomplete-input";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Spec: return "spec";
    case ErrorKind::Degenerate: return "degenerate-input";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::Conditioning: return "conditioning";
    case ErrorKind::Covering: return "covering";
    case ErrorKind::BiLipschitz: return "bi-lipschitz";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    }
    return "error";
}

int worker_count() {
    if (const char* env = std::getenv("TLNUM_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t nchunks = chunk_count(n, chunk);
    const int workers = static_cast<int>(std::min<std::size_t>(worker_count(), nchunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) body(c, c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto run = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= nchunks) return;
            try {
                body(c, c * chunk, std::min(n, (c + 1) * chunk));
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                next.store(nchunks);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < workers; ++i) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term, std::size_t chunk) {
    std::vector<double> part(chunk_count(n, chunk), 0.0);
    parallel_chunks(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        double acc = 0.0;
        for (std::size_t i = b; i < e; ++i) acc += term(i);
        part[c] = acc;
    });
    double total = 0.0;
    for (double v : part) total += v;
    return total;
}

double parallel_max(std::size_t n, const std::function<double(std::size_t)>& term, std::size_t chunk) {
    std::vector<double> part(chunk_count(n, chunk), 0.0);
    parallel_chunks(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        double acc = 0.0;
        for (std::size_t i = b; i < e; ++i) acc = std::max(acc, term(i));
        part[c] = acc;
    });
    double total = 0.0;
    for (double v : part) total = std::max(total, v);
    return total;
}

}

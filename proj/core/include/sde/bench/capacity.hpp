// Copyright 2026 The SDE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "sde/record.hpp"
#include "sde/synopsis_spec.hpp"

namespace sde::bench {

// SDEaaS vs job-per-synopsis. The non-SDEaaS mode models a cluster whose
// every synopsis occupies one task slot out of `slot_budget`: build requests
// beyond the budget are refused, streams are duplicated into every job, and
// each job filters and updates alone.
struct CapacityConfig {
    std::vector<std::size_t> checkpoints = {1, 10, 20, 40};
    std::size_t refusal_probe = 41;  // first build expected to be refused
    std::size_t slot_budget = 40;
    std::size_t n_streams = 100;
    std::size_t records = 20000;
    std::uint32_t engine_workers = 2;
    std::uint64_t seed = 1;
};

struct CapacityRow {
    std::size_t n = 0;  // live synopses during the measurement
    double sdeaas_throughput = 0;
    double jobs_throughput = 0;
    bool jobs_refused = false;
};

std::vector<CapacityRow> run_sdeaas_vs_jobs(const CapacityConfig& config);

// Job-per-synopsis simulation, exposed for tests: submit refuses once the
// slot budget is exhausted.
class JobPool {
public:
    explicit JobPool(std::size_t slot_budget);
    ~JobPool();

    bool submit(const SynopsisSpec& spec);  // false = refused (slots depleted)
    void feed(const std::vector<StreamRecord>& records);  // duplicated to all jobs
    std::size_t jobs() const noexcept;
    std::uint64_t processed() const noexcept;
    void stop();

private:
    struct Job;
    std::size_t slot_budget_;
    std::vector<std::unique_ptr<Job>> jobs_;
};

}  // namespace sde::bench

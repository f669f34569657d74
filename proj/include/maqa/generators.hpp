#pragma once

#include "maqa/model.hpp"

// Direct state-space constructors for the two case studies: a two-station
// queueing system with a shared server, and a polling system with bounded
// job-type queues. Both compose the stations and the server explicitly and
// yield closed, all-internal MAs in BFS order from the initial state.

namespace maqa {

struct QueueParams {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double mu = 1.0;
};

// States (s1, s2, j) over {0,1}^3: arrivals at rate lambda_i while station i
// is empty, a tau poll per occupied station when the server is free (the job
// is erroneously kept with probability 1/10), service at rate mu. Labels
// mark each component value (s1_0, s1_1, ..., j_1).
MarkovAutomaton gen_queueing(const QueueParams& params);

struct PollingParams {
  int queue_capacity = 2;  // Q >= 1
  int job_types = 3;       // N >= 1
};

// Station i in {1,2} holds an ordered queue over job types {1..N} of length
// <= Q and receives arrivals at rate 2i+1 (job type chosen
// nondeterministically); when the server is idle it instantly fetches the
// head of a nonempty queue, keeping the job in the queue with probability
// 1/10; a type-j job is served at rate 2j. States with both queues full are
// labelled "bothFull".
MarkovAutomaton gen_polling(const PollingParams& params);

}  // namespace maqa

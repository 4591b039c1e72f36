#pragma once

#include "craftagent/harness/harness.hpp"

namespace craftagent {

// Fills `out` as it goes, so a caller catching an exception (playback
// errors, say) still sees every finished iteration.
void run_loop(WorldState state, const TrialConfig& config, PlannerBackend& backend,
              const Rules& rules, const PromptTemplates& templates, TrialRecord& out);

}  // namespace craftagent

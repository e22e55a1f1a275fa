#ifndef PANGLOSS_PANGLOSS_HPP
#define PANGLOSS_PANGLOSS_HPP

#include "pangloss/core_model.hpp"
#include "pangloss/delta_cache.hpp"
#include "pangloss/engine.hpp"
#include "pangloss/memsim.hpp"
#include "pangloss/page_cache.hpp"
#include "pangloss/prefetcher.hpp"
#include "pangloss/profiler.hpp"
#include "pangloss/reference_prefetchers.hpp"
#include "pangloss/report.hpp"
#include "pangloss/space_budget.hpp"
#include "pangloss/tracegen.hpp"

#endif // PANGLOSS_PANGLOSS_HPP

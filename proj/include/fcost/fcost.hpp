#pragma once

#include "fcost/cloud_pricing.hpp"
#include "fcost/config.hpp"
#include "fcost/csv.hpp"
#include "fcost/data_model.hpp"
#include "fcost/dates.hpp"
#include "fcost/dev_cost.hpp"
#include "fcost/energy_model.hpp"
#include "fcost/error.hpp"
#include "fcost/estimates.hpp"
#include "fcost/frontier_selection.hpp"
#include "fcost/ground_truth.hpp"
#include "fcost/hardware_cost.hpp"
#include "fcost/pipeline.hpp"
#include "fcost/random.hpp"
#include "fcost/report_io.hpp"
#include "fcost/sensitivity.hpp"
#include "fcost/stats.hpp"
#include "fcost/trend_stats.hpp"
#include "fcost/uncertainty.hpp"

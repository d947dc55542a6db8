#pragma once

#include "asymvol/asymmetry.hpp"
#include "asymvol/config.hpp"
#include "asymvol/error.hpp"
#include "asymvol/eventstudy.hpp"
#include "asymvol/ingest.hpp"
#include "asymvol/pipeline.hpp"
#include "asymvol/report.hpp"
#include "asymvol/stats/adf.hpp"
#include "asymvol/stats/descriptive.hpp"
#include "asymvol/stats/distributions.hpp"
#include "asymvol/stats/hypothesis.hpp"
#include "asymvol/stats/ols.hpp"
#include "asymvol/synth.hpp"
#include "asymvol/version.hpp"
#include "asymvol/volatility.hpp"

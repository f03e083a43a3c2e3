#pragma once

#include "efk/counterfactual.hpp"
#include "efk/dynamics.hpp"
#include "efk/eci.hpp"
#include "efk/error.hpp"
#include "efk/fitness.hpp"
#include "efk/ingest.hpp"
#include "efk/matrix.hpp"
#include "efk/ranking.hpp"
#include "efk/stats.hpp"
#include "efk/synth.hpp"

#pragma once

#include "ictrace/commands.hpp"
#include "ictrace/common.hpp"
#include "ictrace/config.hpp"
#include "ictrace/dgp.hpp"
#include "ictrace/graph.hpp"
#include "ictrace/io.hpp"
#include "ictrace/linalg.hpp"
#include "ictrace/metrics.hpp"
#include "ictrace/oracle.hpp"
#include "ictrace/pipeline.hpp"
#include "ictrace/representations.hpp"
#include "ictrace/rng.hpp"
#include "ictrace/spectral.hpp"
#include "ictrace/svg.hpp"
#include "ictrace/transition.hpp"

#pragma once

#include "kflat/rational.hpp"
#include "kflat/core.hpp"
#include "kflat/transversal.hpp"
#include "kflat/scattered.hpp"
#include "kflat/construction.hpp"
#include "kflat/experiments.hpp"
#include "kflat/io.hpp"

#pragma once

#include "fddt/binning.hpp"
#include "fddt/dataset.hpp"
#include "fddt/evaluation.hpp"
#include "fddt/gmm.hpp"
#include "fddt/margins.hpp"
#include "fddt/serialize.hpp"
#include "fddt/svg.hpp"
#include "fddt/time.hpp"

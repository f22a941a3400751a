#pragma once

// k-mixup: optimal-transport matched mixup augmentation and its analysis tools.

#include "analysis.hpp"
#include "beta.hpp"
#include "coupling.hpp"
#include "csv.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "mixup.hpp"
#include "nn.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "synthetic.hpp"
#include "transport.hpp"

#pragma once

#include "hyperlab/bounds.hpp"
#include "hyperlab/counts.hpp"
#include "hyperlab/error.hpp"
#include "hyperlab/experiment.hpp"
#include "hyperlab/field.hpp"
#include "hyperlab/histogram.hpp"
#include "hyperlab/moebius.hpp"
#include "hyperlab/oracle.hpp"
#include "hyperlab/report.hpp"
#include "hyperlab/sets.hpp"

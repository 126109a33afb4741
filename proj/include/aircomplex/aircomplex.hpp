#pragma once

#include <aircomplex/analytics.hpp>
#include <aircomplex/community.hpp>
#include <aircomplex/contributions.hpp>
#include <aircomplex/error.hpp>
#include <aircomplex/graph.hpp>
#include <aircomplex/indicators.hpp>
#include <aircomplex/pipeline.hpp>
#include <aircomplex/sensitivity.hpp>
#include <aircomplex/sobol_sequence.hpp>
#include <aircomplex/trajectory.hpp>
#include <aircomplex/union_find.hpp>

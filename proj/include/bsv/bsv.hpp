#ifndef BSV_BSV_HPP
#define BSV_BSV_HPP

#include <bsv/acquisition.hpp>
#include <bsv/baselines.hpp>
#include <bsv/bsv_loop.hpp>
#include <bsv/core.hpp>
#include <bsv/estimator.hpp>
#include <bsv/gp_surrogate.hpp>
#include <bsv/grid_posterior.hpp>
#include <bsv/io.hpp>
#include <bsv/metrics.hpp>
#include <bsv/operational_model.hpp>
#include <bsv/proposal_grid.hpp>
#include <bsv/systems.hpp>

#endif

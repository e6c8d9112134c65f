#pragma once

#include "wgflow/errors.hpp"
#include "wgflow/grid.hpp"
#include "wgflow/certificate.hpp"
#include "wgflow/test_function.hpp"
#include "wgflow/stencil.hpp"
#include "wgflow/transport.hpp"
#include "wgflow/lagrangian.hpp"
#include "wgflow/energy_model.hpp"
#include "wgflow/banded.hpp"
#include "wgflow/quantile_distance.hpp"
#include "wgflow/jko.hpp"
#include "wgflow/diagnostics.hpp"
#include "wgflow/io.hpp"
#include "wgflow/config.hpp"

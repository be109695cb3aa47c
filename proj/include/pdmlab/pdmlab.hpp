#pragma once

#include "pdmlab/errors.hpp"
#include "pdmlab/fields.hpp"
#include "pdmlab/grid.hpp"
#include "pdmlab/operators.hpp"
#include "pdmlab/spectral.hpp"
#include "pdmlab/classical.hpp"
#include "pdmlab/evolution.hpp"
#include "pdmlab/config.hpp"
#include "pdmlab/commands.hpp"
#include "pdmlab/acceptance.hpp"

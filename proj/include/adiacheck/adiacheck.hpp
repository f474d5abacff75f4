#pragma once

#include "adiacheck/conditions.hpp"
#include "adiacheck/dynamics.hpp"
#include "adiacheck/errors.hpp"
#include "adiacheck/holonomy.hpp"
#include "adiacheck/linalg.hpp"
#include "adiacheck/models.hpp"
#include "adiacheck/pipeline.hpp"
#include "adiacheck/report_io.hpp"
#include "adiacheck/schedule_io.hpp"
#include "adiacheck/spectral.hpp"
#include "adiacheck/time_grid.hpp"
#include "adiacheck/verify.hpp"

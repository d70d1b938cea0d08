#pragma once

#include "aridem/baseline.hpp"
#include "aridem/element.hpp"
#include "aridem/engine.hpp"
#include "aridem/error.hpp"
#include "aridem/machine.hpp"
#include "aridem/program.hpp"
#include "aridem/programs.hpp"
#include "aridem/report.hpp"
#include "aridem/work.hpp"

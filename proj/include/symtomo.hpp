#pragma once

#include "symtomo/errors.hpp"
#include "symtomo/grid.hpp"
#include "symtomo/types.hpp"
#include "symtomo/flow.hpp"
#include "symtomo/state_catalog.hpp"
#include "symtomo/marginal_field.hpp"
#include "symtomo/tomography.hpp"
#include "symtomo/evolution.hpp"
#include "symtomo/verify.hpp"
#include "symtomo/field_io.hpp"
#include "symtomo/suites.hpp"

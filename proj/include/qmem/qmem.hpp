// Copyright 2026 The qmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qmem/compiler.hpp"
#include "qmem/dynamics.hpp"
#include "qmem/errors.hpp"
#include "qmem/io.hpp"
#include "qmem/pulse.hpp"
#include "qmem/rotation.hpp"
#include "qmem/scenario.hpp"
#include "qmem/state.hpp"
#include "qmem/system.hpp"

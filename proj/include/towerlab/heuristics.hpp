#pragma once
// pending

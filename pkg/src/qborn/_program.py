"""Flat opcode encoding shared by both kernel backends."""
OP_RY = 0
OP_RZ = 1
OP_X = 2
OP_CNOT = 3
OP_PHASE = 4
# noise-only opcodes, never produced by GateCircuit
OP_Y = 5
OP_Z = 6

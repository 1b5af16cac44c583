from streamplan.flowfield import Domain, Uniform


def crossflow(v):
    return Uniform(0.0, v, Domain(-1e5, 1e5, -1e5, 1e5))


def grid_text(n_x, n_y, rows, header=None):
    head = header or f"FLOWGRID {n_x} {n_y} 0 0 1 1"
    return head + "\n" + "\n".join(rows) + "\n"

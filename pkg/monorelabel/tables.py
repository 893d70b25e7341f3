"""
Column definitions for the result document and the bench table.

Each entry maps a field of the underlying record to the header it is shown
under; `format` (when present) renders the cell and `timing` marks a
wall-clock column the bench table shows only on request.
"""

SECONDS = "{:.4f}".format


defaultColDef = {
    "missing": "-",
    "separator": ",",
}

result_columnDefs = [
    {'headerName': 'objective', 'field': 'objective_name'},
    {'headerName': 'order', 'field': 'order'},
    {'headerName': 'n', 'field': 'n'},
    {'headerName': 'g', 'field': 'g'},
    {'headerName': 'kept', 'field': 'kept_set'},
    {'headerName': 'l0_distance', 'field': 'l0_distance'},
    {'headerName': 'stage_counts', 'field': 'stage_counts'},
    {'headerName': 'p', 'field': 'p'},
    {'headerName': 'lp_error', 'field': 'lp_error'},
    {'headerName': 'objective_value', 'field': 'objective'},
    {'headerName': 'trim_error', 'field': 'trim_error'},
    {'headerName': 'sum_squares', 'field': 'sum_squares'},
]

distance_columnDefs = [
    {'headerName': 'order', 'field': 'order'},
    {'headerName': 'n', 'field': 'n'},
    {'headerName': 'violators', 'field': 'n_hat'},
    {'headerName': 'kept_violators', 'field': 'kept'},
    {'headerName': 'l0_distance', 'field': 'l0_distance'},
]

oracle_columnDefs = [
    {'headerName': 'objective', 'field': 'objective_name'},
    {'headerName': 'n', 'field': 'n'},
    {'headerName': 'value', 'field': 'value'},
    {'headerName': 'g', 'field': 'g'},
]

bench_columnDefs = [
    {'headerName': 'family', 'field': 'family'},
    {'headerName': 'n', 'field': 'n'},
    {'headerName': 'violators', 'field': 'n_hat'},
    {'headerName': 'closure_edges', 'field': 'm_closure'},
    {'headerName': 'reduction_edges', 'field': 'm_reduction'},
    {'headerName': 'l0_distance', 'field': 'l0_distance'},
    {'headerName': 'flow_s', 'field': 'flow_s', 'format': SECONDS, 'timing': True},
    {'headerName': 'dp_s', 'field': 'dp_s', 'format': SECONDS, 'timing': True},
]

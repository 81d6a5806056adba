use std::collections::BTreeSet;

use super::{ColumnKind, RawTable, Schema};

pub const TICTACTOE_LABEL: &str = "x_wins";

/// The eight winning lines as (row, col) triples: three verticals, the
/// anti-diagonal, three horizontals, then the main diagonal.
pub const TICTACTOE_LINES: [[(usize, usize); 3]; 8] = [
    [(0, 0), (1, 0), (2, 0)],
    [(0, 1), (1, 1), (2, 1)],
    [(0, 2), (1, 2), (2, 2)],
    [(2, 0), (1, 1), (0, 2)],
    [(0, 0), (0, 1), (0, 2)],
    [(1, 0), (1, 1), (1, 2)],
    [(2, 0), (2, 1), (2, 2)],
    [(0, 0), (1, 1), (2, 2)],
];

pub fn cell_name(row: usize, col: usize) -> String {
    format!("cell_r{row}_c{col}")
}

type Board = [u8; 9];

fn wins(board: &Board, mark: u8) -> bool {
    TICTACTOE_LINES
        .iter()
        .any(|line| line.iter().all(|&(r, c)| board[r * 3 + c] == mark))
}

fn explore(board: &mut Board, to_move: u8, seen: &mut BTreeSet<Board>) {
    if wins(board, b'x') || wins(board, b'o') || !board.contains(&b'b') {
        seen.insert(*board);
        return;
    }
    let next = if to_move == b'x' { b'o' } else { b'x' };
    for cell in 0..9 {
        if board[cell] == b'b' {
            board[cell] = to_move;
            explore(board, next, seen);
            board[cell] = b'b';
        }
    }
}

pub fn tictactoe_schema() -> Schema {
    let mut columns: Vec<(String, ColumnKind)> = (0..3)
        .flat_map(|r| (0..3).map(move |c| (cell_name(r, c), ColumnKind::Categorical)))
        .collect();
    columns.push((TICTACTOE_LABEL.to_string(), ColumnKind::Categorical));
    Schema { columns, label: TICTACTOE_LABEL.to_string() }
}

/// Every distinct terminal board reachable with x moving first, labelled by
/// whether x completed a line.
pub fn generate_tictactoe() -> RawTable {
    let mut seen = BTreeSet::new();
    explore(&mut [b'b'; 9], b'x', &mut seen);
    let schema = tictactoe_schema();
    let rows = seen
        .iter()
        .map(|board| {
            let mut row: Vec<String> =
                board.iter().map(|&m| char::from(m).to_string()).collect();
            row.push(wins(board, b'x').to_string());
            row
        })
        .collect();
    RawTable {
        names: schema.columns.iter().map(|(n, _)| n.clone()).collect(),
        kinds: schema.columns.iter().map(|(_, k)| *k).collect(),
        rows,
        label: schema.label,
    }
}

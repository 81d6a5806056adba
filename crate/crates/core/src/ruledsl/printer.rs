use super::lexer::is_plain_ident;
use super::{Literal, RuleSet, Template};

/// Renders a categorical value bare when it lexes back to itself, quoted
/// otherwise.
pub fn format_value(v: &str) -> String {
    let numeric = v.parse::<f64>().is_ok_and(f64::is_finite)
        && v.chars().all(|c| c.is_ascii_digit() || ".+-eE".contains(c));
    if is_plain_ident(v) || numeric {
        v.to_string()
    } else {
        let escaped = v.replace('\\', "\\\\").replace('"', "\\\"");
        format!("\"{escaped}\"")
    }
}

fn clause(literals: &[Literal]) -> String {
    let body = literals.iter().map(ToString::to_string).collect::<Vec<_>>().join(" AND ");
    if literals.len() > 1 {
        format!("({body})")
    } else {
        body
    }
}

/// One clause per line, joined by `OR`; the empty rule set prints as `FALSE`.
pub fn print_rules(rule_set: &RuleSet) -> String {
    if rule_set.is_empty() {
        return "FALSE".to_string();
    }
    rule_set
        .conjunctions
        .iter()
        .map(|c| clause(c.literals()))
        .collect::<Vec<_>>()
        .join("\nOR ")
}

pub fn print_templates(templates: &[Template]) -> String {
    templates.iter().map(|t| clause(t.literals())).collect::<Vec<_>>().join("\nOR ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Condition;
    use crate::ruledsl::{parse_rules, Conjunction, Provenance};
    use proptest::prelude::*;

    #[test]
    fn empty_prints_false() {
        assert_eq!(print_rules(&RuleSet::default()), "FALSE");
    }

    #[test]
    fn single_literal_needs_no_parentheses() {
        let rs = parse_rules("a > 5").unwrap();
        assert_eq!(print_rules(&rs), "a > 5");
        let rs = parse_rules("a > 5 AND b == \"two words\"").unwrap();
        assert_eq!(print_rules(&rs), "(a > 5 AND b == \"two words\")");
    }

    fn literal() -> impl Strategy<Value = Literal> {
        let feature = prop_oneof![Just("a"), Just("b"), Just("Cell_1"), Just("z.k")];
        let cond = prop_oneof![
            prop_oneof![Just("x"), Just("o"), Just("1"), Just("and"), Just("q\"t"), Just("-2.5")]
                .prop_flat_map(|v| prop_oneof![
                    Just(Condition::Equals(v.to_string())),
                    Just(Condition::NotEquals(v.to_string()))
                ]),
            (-1e6f64..1e6).prop_flat_map(|t| prop_oneof![
                Just(Condition::LessEqual(t)),
                Just(Condition::Less(t)),
                Just(Condition::GreaterEqual(t)),
                Just(Condition::Greater(t))
            ]),
        ];
        (feature, cond).prop_map(|(f, c)| Literal::new(f, c))
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(clauses in proptest::collection::vec(
            proptest::collection::vec(literal(), 1..4), 0..5)
        ) {
            let rs = RuleSet::new(
                clauses
                    .into_iter()
                    .filter_map(|l| Conjunction::new(l, Provenance::Human).ok())
                    .collect(),
            );
            let back = parse_rules(&print_rules(&rs)).unwrap();
            prop_assert!(back.same_rules(&rs), "{}", print_rules(&rs));
            prop_assert_eq!(back, rs);
        }
    }
}

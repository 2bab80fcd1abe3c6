//! Recursive-descent parser for the supported SQL subset.

use crate::types::AggregateFn;

use super::lexer::{join_tokens, lex, Tok, Token};
use super::{QueryIR, SelectItem, SelectKind, SqlError};

/// Keywords that terminate an expression or may not serve as bare aliases.
const RESERVED: [&str; 28] = [
    "select", "from", "where", "group", "order", "having", "limit", "by", "as", "and", "or",
    "not", "asc", "desc", "on", "join", "inner", "outer", "left", "right", "union", "exists",
    "in", "between", "like", "case", "when", "distinct",
];

fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    input_len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    fn byte_pos(&self) -> usize {
        self.tokens.get(self.pos).map(|t| t.pos).unwrap_or(self.input_len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let tok = self.tokens.get(self.pos).map(|t| t.tok.clone());
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: impl Into<String>) -> SqlError {
        SqlError::ParseError { position: self.byte_pos(), expected: expected.into() }
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().map(|t| t.is_kw(kw)).unwrap_or(false)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), SqlError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(format!("`{kw}`")))
        }
    }

    /// Consume tokens until a depth-0 stop condition, balancing parens.
    /// Returns the consumed tokens.
    fn take_until(&mut self, stop: impl Fn(&Tok, usize) -> bool) -> Vec<Tok> {
        let mut taken = Vec::new();
        let mut depth = 0usize;
        while let Some(tok) = self.peek() {
            if depth == 0 && stop(tok, depth) {
                break;
            }
            if tok.is_sym("(") {
                depth += 1;
            } else if tok.is_sym(")") {
                if depth == 0 {
                    break;
                }
                depth -= 1;
            }
            taken.push(self.bump().expect("peeked token exists"));
        }
        taken
    }

    /// Parse a possibly qualified identifier (`a`, `a.b`), returning the
    /// final segment (result sets carry unqualified names).
    fn qualified_ident(&mut self) -> Result<String, SqlError> {
        let first = match self.peek() {
            Some(Tok::Ident(id)) if !is_reserved(id) => id.clone(),
            _ => return Err(self.error("a column name")),
        };
        self.pos += 1;
        let mut last = first;
        while self.peek().map(|t| t.is_sym(".")).unwrap_or(false) {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Ident(id)) => {
                    last = id.clone();
                    self.pos += 1;
                }
                _ => return Err(self.error("an identifier after `.`")),
            }
        }
        Ok(last)
    }

    fn parse_select_item(&mut self) -> Result<SelectItem, SqlError> {
        if self.peek().map(|t| t.is_sym("*")).unwrap_or(false) {
            self.pos += 1;
            return Ok(SelectItem { kind: SelectKind::Star, alias: None });
        }

        // Aggregate call: known function name followed immediately by `(`.
        if let (Some(Tok::Ident(name)), Some(next)) = (self.peek(), self.peek_at(1)) {
            if let Some(func) = AggregateFn::from_name(name) {
                if next.is_sym("(") {
                    self.pos += 2;
                    let arg_tokens = self.take_until(|_, _| false);
                    if !self.peek().map(|t| t.is_sym(")")).unwrap_or(false) {
                        return Err(self.error("`)` closing the aggregate call"));
                    }
                    self.pos += 1;
                    let arg = if arg_tokens.is_empty() {
                        return Err(self.error("an aggregate argument"));
                    } else {
                        join_tokens(&arg_tokens)
                    };
                    let alias = self.parse_alias()?;
                    return Ok(SelectItem { kind: SelectKind::Aggregate { func, arg }, alias });
                }
            }
        }

        // Plain column or general expression: consume until a top-level
        // comma, clause keyword, or AS.
        let mut expr_tokens = self.take_until(|tok, _| {
            tok.is_sym(",") || tok.is_kw("from") || tok.is_kw("as")
        });
        if expr_tokens.is_empty() {
            return Err(self.error("a select expression"));
        }
        // A trailing identifier directly after a value-shaped token is a
        // bare alias (`select region area`), unless an AS alias follows.
        let mut bare_alias = None;
        if expr_tokens.len() >= 2 && !self.at_kw("as") {
            let last_is_name =
                matches!(expr_tokens.last(), Some(Tok::Ident(id)) if !is_reserved(id));
            let penult_ends_expr = match &expr_tokens[expr_tokens.len() - 2] {
                Tok::Ident(id) => !is_reserved(id),
                Tok::Number(_) | Tok::Str(_) => true,
                Tok::Sym(s) => *s == ")",
            };
            if last_is_name && penult_ends_expr {
                if let Some(Tok::Ident(id)) = expr_tokens.pop() {
                    bare_alias = Some(id);
                }
            }
        }
        // Single bare identifier (possibly qualified) is a column reference;
        // strip the qualifier because result sets use bare names.
        let expr = match expr_tokens.as_slice() {
            [Tok::Ident(id)] if !is_reserved(id) => id.clone(),
            [Tok::Ident(_), Tok::Sym("."), Tok::Ident(col)] => col.clone(),
            _ => join_tokens(&expr_tokens),
        };
        let alias = match bare_alias {
            Some(a) => Some(a),
            None => self.parse_alias()?,
        };
        Ok(SelectItem { kind: SelectKind::Plain { expr }, alias })
    }

    /// Optional alias: `AS name`, or a bare non-reserved identifier.
    fn parse_alias(&mut self) -> Result<Option<String>, SqlError> {
        if self.eat_kw("as") {
            match self.peek() {
                Some(Tok::Ident(id)) if !is_reserved(id) => {
                    let alias = id.clone();
                    self.pos += 1;
                    Ok(Some(alias))
                }
                _ => Err(self.error("an alias after `as`")),
            }
        } else if let Some(Tok::Ident(id)) = self.peek() {
            if !is_reserved(id) {
                let alias = id.clone();
                self.pos += 1;
                Ok(Some(alias))
            } else {
                Ok(None)
            }
        } else {
            Ok(None)
        }
    }

    /// Collect top-level table names from the FROM clause tokens.
    fn tables_from(tokens: &[Tok]) -> Vec<String> {
        let mut tables = Vec::new();
        let mut expect_table = true;
        let mut depth = 0usize;
        let mut i = 0;
        while i < tokens.len() {
            let tok = &tokens[i];
            if tok.is_sym("(") {
                depth += 1;
                if depth == 1 && expect_table {
                    // Subquery in table position; its alias is not a table.
                    expect_table = false;
                }
            } else if tok.is_sym(")") {
                depth = depth.saturating_sub(1);
            } else if depth == 0 {
                if tok.is_sym(",") || tok.is_kw("join") {
                    expect_table = true;
                } else if expect_table {
                    if let Some(id) = tok.ident() {
                        if !is_reserved(id) {
                            // Absorb qualification: db.schema.table.
                            let mut name = id.to_string();
                            while i + 2 < tokens.len()
                                && tokens[i + 1].is_sym(".")
                                && tokens[i + 2].ident().is_some()
                            {
                                name = tokens[i + 2].ident().unwrap().to_string();
                                i += 2;
                            }
                            tables.push(name);
                            expect_table = false;
                        }
                    }
                }
            }
            i += 1;
        }
        tables
    }

    /// Parse one ORDER BY key: column or position, optional direction.
    fn parse_order_key(&mut self) -> Result<String, SqlError> {
        let mut key = match self.peek() {
            Some(Tok::Number(n)) => {
                let n = n.clone();
                self.pos += 1;
                n
            }
            Some(Tok::Ident(_)) => self.qualified_ident()?,
            _ => return Err(self.error("an ordering key")),
        };
        if self.eat_kw("desc") {
            key.push_str(" desc");
        } else if self.eat_kw("asc") {
            key.push_str(" asc");
        }
        Ok(key)
    }
}

/// Parse a single SELECT statement into its structural summary.
///
/// Non-SELECT statements are rejected with
/// [`SqlError::UnsupportedStatement`]; anything structurally broken inside a
/// SELECT reports the byte position and what was expected.
pub fn parse_sql(input: &str) -> Result<QueryIR, SqlError> {
    let tokens = lex(input)?;
    if tokens.is_empty() {
        return Err(SqlError::ParseError { position: 0, expected: "a SELECT statement".into() });
    }
    if !tokens[0].tok.is_kw("select") {
        let head = match &tokens[0].tok {
            Tok::Ident(id) => id.clone(),
            other => format!("{other:?}"),
        };
        return Err(SqlError::UnsupportedStatement(format!(
            "statement starts with `{head}`; only SELECT is supported"
        )));
    }

    let mut p = Parser { tokens, pos: 1, input_len: input.len() };

    // Select list.
    let mut select_items = Vec::new();
    loop {
        select_items.push(p.parse_select_item()?);
        if p.peek().map(|t| t.is_sym(",")).unwrap_or(false) {
            p.pos += 1;
            continue;
        }
        break;
    }

    p.expect_kw("from")?;
    let from_tokens = p.take_until(|tok, _| {
        ["where", "group", "having", "order", "limit", "fetch"].iter().any(|kw| tok.is_kw(kw))
            || tok.is_sym(";")
    });
    if from_tokens.is_empty() {
        return Err(p.error("a table reference after `from`"));
    }
    let tables = Parser::tables_from(&from_tokens);
    let from_text = join_tokens(&from_tokens);

    let mut where_text = None;
    if p.eat_kw("where") {
        let tokens = p.take_until(|tok, _| {
            ["group", "having", "order", "limit", "fetch"].iter().any(|kw| tok.is_kw(kw))
                || tok.is_sym(";")
        });
        if tokens.is_empty() {
            return Err(p.error("a predicate after `where`"));
        }
        where_text = Some(join_tokens(&tokens));
    }

    let mut group_by = Vec::new();
    if p.eat_kw("group") {
        p.expect_kw("by")?;
        loop {
            let name = match p.peek() {
                Some(Tok::Number(n)) => {
                    // Positional reference: resolve against the select list.
                    let idx: usize = n
                        .parse()
                        .ok()
                        .filter(|i| (1..=select_items.len()).contains(i))
                        .ok_or_else(|| p.error("a valid select-list position"))?;
                    p.pos += 1;
                    select_items[idx - 1].display_name()
                }
                _ => p.qualified_ident().map_err(|_| p.error("a grouping column"))?,
            };
            group_by.push(name);
            if p.peek().map(|t| t.is_sym(",")).unwrap_or(false) {
                p.pos += 1;
                continue;
            }
            break;
        }
    }

    let mut having_text = None;
    if p.eat_kw("having") {
        let tokens = p.take_until(|tok, _| {
            ["order", "limit", "fetch"].iter().any(|kw| tok.is_kw(kw)) || tok.is_sym(";")
        });
        if tokens.is_empty() {
            return Err(p.error("a predicate after `having`"));
        }
        having_text = Some(join_tokens(&tokens));
    }

    let mut order_by = Vec::new();
    if p.eat_kw("order") {
        p.expect_kw("by")?;
        loop {
            order_by.push(p.parse_order_key()?);
            if p.peek().map(|t| t.is_sym(",")).unwrap_or(false) {
                p.pos += 1;
                continue;
            }
            break;
        }
    }

    let mut limit = None;
    if p.eat_kw("limit") {
        match p.peek() {
            Some(Tok::Number(n)) => {
                limit = Some(n.clone());
                p.pos += 1;
            }
            _ => return Err(p.error("a row count after `limit`")),
        }
    } else if p.at_kw("fetch") {
        // `fetch first N rows only`: normalize into the limit slot.
        p.pos += 1;
        let tokens = p.take_until(|tok, _| tok.is_sym(";"));
        limit = Some(format!("fetch {}", join_tokens(&tokens)));
    }

    // Optional trailing semicolon, then end of input.
    if p.peek().map(|t| t.is_sym(";")).unwrap_or(false) {
        p.pos += 1;
    }
    if p.peek().is_some() {
        return Err(p.error("end of statement"));
    }

    let has_where = where_text.is_some();
    Ok(QueryIR {
        select_items,
        group_by,
        has_where,
        where_text,
        having_text,
        order_by,
        limit,
        tables,
        from_text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_simple_grouped_query() {
        let ir = parse_sql(
            "SELECT region, SUM(sales) AS total_sales FROM orders GROUP BY region ORDER BY region",
        )
        .unwrap();
        assert_eq!(ir.select_items.len(), 2);
        assert_eq!(ir.select_items[0].display_name(), "region");
        assert_eq!(
            ir.select_items[1].kind,
            SelectKind::Aggregate { func: AggregateFn::Sum, arg: "sales".into() }
        );
        assert_eq!(ir.select_items[1].display_name(), "total_sales");
        assert_eq!(ir.group_by, vec!["region"]);
        assert!(!ir.has_where);
        assert_eq!(ir.tables, vec!["orders"]);
        assert_eq!(ir.order_by, vec!["region"]);
    }

    #[test]
    fn group_by_position_resolves_to_the_select_item() {
        let ir = parse_sql("select region, count(*) as n from t group by 1").unwrap();
        assert_eq!(ir.group_by, vec!["region"]);
        assert!(matches!(
            parse_sql("select region from t group by 3"),
            Err(SqlError::ParseError { .. })
        ));
    }

    #[test]
    fn subqueries_are_skipped_not_analyzed() {
        let ir = parse_sql(
            "select o_orderpriority, count(*) as order_count from orders \
             where o_orderdate >= date '1993-07-01' and exists (select * from lineitem \
             where l_orderkey = o_orderkey) group by o_orderpriority order by o_orderpriority;",
        )
        .unwrap();
        assert!(ir.has_where);
        assert_eq!(ir.tables, vec!["orders"]);
        assert_eq!(ir.group_by, vec!["o_orderpriority"]);
        assert_eq!(ir.selected_names(), vec!["o_orderpriority", "order_count"]);
    }

    #[test]
    fn from_subquery_with_alias_contributes_no_tables() {
        let ir = parse_sql(
            "select cntrycode, count(*) as numcust from (select substring(c_phone from 1 for 2) \
             as cntrycode from customer) as custsale group by cntrycode",
        )
        .unwrap();
        assert!(ir.tables.is_empty());
        assert_eq!(ir.group_by, vec!["cntrycode"]);
    }

    #[test]
    fn non_select_statements_are_unsupported() {
        assert!(matches!(
            parse_sql("insert into t values (1)"),
            Err(SqlError::UnsupportedStatement(_))
        ));
        assert!(matches!(
            parse_sql("update t set a = 1"),
            Err(SqlError::UnsupportedStatement(_))
        ));
    }

    #[test]
    fn parse_errors_carry_position_and_expectation() {
        match parse_sql("select from t") {
            Err(SqlError::ParseError { position, expected }) => {
                assert_eq!(position, 7);
                assert!(expected.contains("select expression"), "got: {expected}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
        assert!(matches!(parse_sql("select a, b frm t"), Err(SqlError::ParseError { .. })));
    }

    #[test]
    fn pretty_print_is_a_fixed_point() {
        let queries = [
            "SELECT region, SUM(sales) AS total FROM orders WHERE year >= 2020 GROUP BY region ORDER BY total DESC LIMIT 10",
            "select l_returnflag, l_linestatus, sum(l_quantity) as sum_qty, avg(l_extendedprice) as avg_price, count(*) as count_order from lineitem where l_shipdate <= date '1998-12-01' - interval '90' day group by l_returnflag, l_linestatus order by l_returnflag, l_linestatus",
            "select a.x, max(b.y) from t1 a, t2 b where a.id = b.id group by a.x",
            "select * from t",
        ];
        for q in queries {
            let ir = parse_sql(q).unwrap();
            let printed = ir.pretty_print();
            let reparsed = parse_sql(&printed)
                .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
            assert_eq!(ir, reparsed, "round trip changed the IR for `{q}`");
            assert_eq!(printed, reparsed.pretty_print());
        }
    }

    #[test]
    fn bare_aliases_and_qualified_columns() {
        let ir = parse_sql("select t.region area, sum(t.sales) total from t group by t.region").unwrap();
        assert_eq!(ir.select_items[0].display_name(), "area");
        assert_eq!(ir.select_items[0].kind, SelectKind::Plain { expr: "region".into() });
        assert_eq!(ir.select_items[1].display_name(), "total");
        assert_eq!(ir.group_by, vec!["region"]);
    }
}

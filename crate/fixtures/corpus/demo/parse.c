/* parse "a b c d" tuples with an optional consumed-length suffix */
static int parse_tuning_line(const char *str)
{
	int a, b, c, d, n;
	int ret;

	ret = sscanf(str, "%d %d %d %d%n", &a, &b, &c, &d, &n);
	if (ret >= 4) {
		consume(a, b, c, d);
		if (ret > 4)
			consume_extra(n);
		return 0;
	}
	return -1;
}

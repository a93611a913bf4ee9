/*
 * String formatting helpers.
 */

#include <stdarg.h>

int vsscanf(const char *buf, const char *fmt, va_list args)
{
	const char *str = buf;
	int num = 0;

	while (*fmt) {
		/* conversion loop elided: consumes one field per specifier */
		if (*str == '\0')
			break;
		num++;
		fmt++;
	}

	return num;
}

/**
 * sscanf - Unformat a buffer into a list of arguments
 * @buf: input buffer
 * @fmt: formatting of buffer
 * @...: resulting arguments
 */
int sscanf(const char *buf, const char *fmt, ...)
{
	va_list args;
	int i;

	va_start(args, fmt);
	i = vsscanf(buf, fmt, args);
	va_end(args);

	return i;
}

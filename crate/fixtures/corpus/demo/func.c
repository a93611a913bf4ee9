/* two-path demo initializer: early error return skips the write */
extern int some_condi;

int func(int* a){
	if(some_condi)
		return -1;
	*a = 42;
	return 0;
}

int use_func(void)
{
	int value;
	int ret;

	ret = func(&value);
	if (ret == 0)
		return value;
	return 0;
}

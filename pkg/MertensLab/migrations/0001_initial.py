# Generated by Django 5.1.4 on 2026-10-17 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='AuditRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
                ('artifact_version', models.CharField(max_length=32)),
                ('n_max', models.BigIntegerField()),
                ('config_echo', models.JSONField(default=dict)),
                ('report_sha256', models.CharField(db_index=True, max_length=64)),
                ('verdict_count', models.PositiveIntegerField(default=0)),
                ('all_hold', models.BooleanField(default=True)),
            ],
            options={
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['artifact_version', 'n_max'], name='mertenslab_run_version_idx')],
            },
        ),
        migrations.CreateModel(
            name='ClaimVerdictRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('claim_id', models.CharField(max_length=64)),
                ('range_lo', models.BigIntegerField()),
                ('range_hi', models.BigIntegerField()),
                ('holds', models.BooleanField()),
                ('first_violation', models.BigIntegerField(blank=True, null=True)),
                ('worst_margin', models.FloatField()),
                ('argmax_n', models.BigIntegerField(blank=True, null=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='verdicts', to='MertensLab.auditrun')),
            ],
            options={
                'ordering': ['id'],
                'constraints': [models.UniqueConstraint(fields=('run', 'claim_id'), name='mertenslab_unique_run_claim')],
            },
        ),
    ]
